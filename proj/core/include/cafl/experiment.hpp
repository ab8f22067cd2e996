#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "cafl/ca_selector.hpp"
#include "cafl/config.hpp"
#include "cafl/dataset.hpp"
#include "cafl/export.hpp"
#include "cafl/latency.hpp"
#include "cafl/metrics.hpp"
#include "cafl/mobility.hpp"
#include "cafl/model.hpp"

namespace cafl {

struct ScoreSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

/// Everything observed during one federated round.
struct RoundRecord {
  StrategyKind strategy = StrategyKind::kCaCs;
  std::uint64_t seed = 0;
  int round = 0;  // 1-based

  std::vector<Coord> selected;
  // Scores of the selected cells; absent for random selection.
  std::optional<ScoreSummary> scores;
  RoundTiming timing;
  EvalMetrics metrics;

  // SQ per cell (row-major) as measured this round.
  std::vector<std::int64_t> cell_samples;
  // Selected cells that held no data and were skipped.
  std::size_t empty_selected = 0;
  // No selected cell had data; the global model carried over.
  bool degenerate = false;

  // Conservation bookkeeping, checked in-loop.
  std::size_t samples_held = 0;
  std::size_t initial_allocation = 0;
  std::size_t arrivals_total = 0;
  std::size_t fallback_total = 0;
};

RoundRow to_row(const RoundRecord& record);

struct PreparedData {
  Dataset train;
  Dataset test;
};

// Loads or synthesises the dataset described by `config` and splits it.
PreparedData prepare_data(const ExperimentConfig& config);

/// One (strategy, seed) simulation. Environment randomness (population,
/// mobility, CC draws, model init, local shuffles) derives from the seed alone,
/// so runs of different strategies under one seed face identical conditions
/// until their selections diverge.
class Simulation {
 public:
  Simulation(const ExperimentConfig& config, const PreparedData& data,
             StrategyKind strategy, std::uint64_t seed);

  /// mobility -> measurement -> CA update (NPC, TC from the previous snapshot,
  /// then SQ/IS/DQ, then CC) -> selection -> straggler flags and timing ->
  /// local training -> FedAvg -> evaluation.
  RoundRecord run_round();

  int rounds_completed() const noexcept { return round_; }
  const Grid& grid() const noexcept { return grid_; }
  const Population& population() const noexcept { return population_; }
  const ModelParams& global_model() const noexcept { return global_; }
  const Model& model() const noexcept { return *model_; }
  // FedAvg weights (unique samples per trained cell) of the last round,
  // row-major over cells, 0 for cells that did not train.
  const std::vector<double>& last_weights() const noexcept { return last_weights_; }

 private:
  const ExperimentConfig& config_;
  const PreparedData& data_;
  StrategyKind strategy_kind_;
  std::uint64_t seed_;
  int round_ = 0;

  std::unique_ptr<Model> model_;
  std::unique_ptr<SelectionStrategy> strategy_;
  ModelParams global_;
  Grid grid_;
  Population population_;
  RandomSource mobility_rng_;
  RandomSource capacity_rng_;
  RandomSource selection_rng_;
  std::size_t arrivals_total_ = 0;
  std::size_t fallback_total_ = 0;
  std::vector<double> last_weights_;
};

std::vector<RoundRecord> run_simulation(const ExperimentConfig& config,
                                        const PreparedData& data,
                                        StrategyKind strategy,
                                        std::uint64_t seed);

struct ResultsBundle {
  std::vector<RoundRecord> records;
  std::vector<RoundRow> rows;
  std::vector<SummaryRow> summary;
};

using ProgressCallback =
    std::function<void(StrategyKind, std::uint64_t seed, const RoundRecord&)>;

/// Validates the config, prepares the data once, and runs every
/// (strategy, seed) pair: strategies in config order, seeds inner.
ResultsBundle run_experiment(const ExperimentConfig& config,
                             const ProgressCallback& progress = {});
ResultsBundle run_experiment(const ExperimentConfig& config,
                             const PreparedData& data,
                             const ProgressCallback& progress = {});

}  // namespace cafl
