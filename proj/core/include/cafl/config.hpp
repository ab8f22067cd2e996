#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cafl/ca_selector.hpp"
#include "cafl/latency.hpp"
#include "cafl/mobility.hpp"
#include "cafl/model.hpp"

namespace cafl {

enum class TimingMode {
  kWallclock,  // measured local training + aggregation time
  kSimulated,  // seconds_per_sample * sum of selected SQ
};

std::string_view to_string(TimingMode mode) noexcept;
TimingMode parse_timing_mode(std::string_view name);

struct IdxPair {
  std::filesystem::path images;
  std::filesystem::path labels;
};

struct DatasetSpec {
  enum class Kind { kSynthetic, kMnistIdx };

  Kind kind = Kind::kSynthetic;
  // Synthetic blobs.
  std::size_t n_samples = 10000;
  std::size_t n_features = 32;
  double mean_spread = 4.0;
  // IDX files, concatenated in order before the train/test split.
  std::vector<IdxPair> files;
  int n_classes = 10;
  // Seeds dataset synthesis and the train/test split. Shared by every
  // (strategy, seed) run so all runs see the same data.
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  int grid_side = 5;
  DatasetSpec dataset;
  double test_frac = 0.2;
  int rounds = 20;
  TrainerSpec trainer;
  CaParams ca;
  MobilityParams mobility;
  LatencyParams latency;
  std::vector<StrategyKind> strategies{StrategyKind::kCaCs, StrategyKind::kRandom};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  TimingMode timing = TimingMode::kWallclock;
  double seconds_per_sample = 1e-3;
  std::filesystem::path output_dir = "results";

  // Throws ConfigError describing the first invalid field.
  void validate() const;
};

/// Parses a JSON config. Missing fields keep their defaults; unknown keys are
/// rejected and the result is validated. Relative IDX paths resolve against
/// `base_dir`. A run manifest (an object with a "config" member) is accepted
/// as well.
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path);

// Fully resolved config as pretty-printed JSON; parse_config round-trips it.
std::string config_to_json(const ExperimentConfig& config);

// Comma-separated overrides as accepted on the command line.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::vector<StrategyKind> parse_strategy_list(std::string_view text);

}  // namespace cafl
