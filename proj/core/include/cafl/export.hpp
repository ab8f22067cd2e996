#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cafl {

struct ExperimentConfig;

/// One line of rounds.csv.
struct RoundRow {
  std::string strategy;
  std::uint64_t seed = 0;
  int round = 0;
  std::size_t n_selected = 0;
  std::size_t n_stragglers_selected = 0;
  double penalty_s = 0.0;
  double train_s = 0.0;
  double total_s = 0.0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single seed
};

/// Per-strategy aggregate over seeds.
struct SummaryRow {
  std::string strategy;
  std::size_t n_seeds = 0;
  MeanStd final_accuracy;
  MeanStd final_macro_f1;
  MeanStd total_seconds;
  MeanStd stragglers_selected;
};

// Per (strategy, seed) totals that feed the summary.
struct SeedTotals {
  std::string strategy;
  std::uint64_t seed = 0;
  int final_round = 0;
  double final_accuracy = 0.0;
  double final_macro_f1 = 0.0;
  double total_seconds = 0.0;
  std::size_t stragglers_selected = 0;
};

std::vector<SeedTotals> seed_totals(std::span<const RoundRow> rows);

// Strategies appear in first-seen order.
std::vector<SummaryRow> summarize(std::span<const RoundRow> rows);

// Six significant digits, printf %.6g.
std::string format_float(double value);

inline constexpr const char* kRoundsHeader =
    "strategy,seed,round,n_selected,n_stragglers_selected,penalty_s,train_s,"
    "total_s,accuracy,macro_f1";
inline constexpr const char* kSummaryHeader =
    "strategy,n_seeds,final_accuracy_mean,final_accuracy_std,"
    "final_macro_f1_mean,final_macro_f1_std,total_seconds_mean,"
    "total_seconds_std,stragglers_selected_mean,stragglers_selected_std";

void write_rounds_csv(std::ostream& out, std::span<const RoundRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

// Throws DataError naming the line on malformed input.
std::vector<RoundRow> read_rounds_csv(std::istream& in);
std::vector<RoundRow> read_rounds_csv(const std::filesystem::path& path);

// Resolved config, seeds, record count and version string as JSON.
std::string manifest_json(const ExperimentConfig& config, std::size_t n_records);

std::string version_string();

/// Writes rounds.csv, summary.csv and manifest.json under `dir`, creating it
/// if needed. Throws OutputError naming the failing path.
void export_results(std::span<const RoundRow> rows,
                    std::span<const SummaryRow> summary,
                    const ExperimentConfig& config,
                    const std::filesystem::path& dir);

}  // namespace cafl
