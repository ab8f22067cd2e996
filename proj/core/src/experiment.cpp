#include "cafl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cafl/errors.hpp"
#include "cafl/fedavg.hpp"

namespace cafl {

RoundRow to_row(const RoundRecord& record) {
  RoundRow row;
  row.strategy = std::string(to_string(record.strategy));
  row.seed = record.seed;
  row.round = record.round;
  row.n_selected = record.selected.size();
  row.n_stragglers_selected = record.timing.stragglers_selected;
  row.penalty_s = record.timing.penalty_seconds;
  row.train_s = record.timing.train_seconds;
  row.total_s = record.timing.total_seconds;
  row.accuracy = record.metrics.accuracy;
  row.macro_f1 = record.metrics.macro_f1;
  return row;
}

PreparedData prepare_data(const ExperimentConfig& config) {
  const DatasetSpec& spec = config.dataset;
  Dataset full;
  if (spec.kind == DatasetSpec::Kind::kSynthetic) {
    RandomSource rng(spec.seed, Stream::kSynthetic);
    full = synth_dataset(spec.n_samples, spec.n_features, spec.n_classes, rng,
                         spec.mean_spread);
  } else {
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> files;
    for (const IdxPair& p : spec.files) files.emplace_back(p.images, p.labels);
    full = load_idx_files(files, spec.n_classes);
  }
  full.validate();
  RandomSource split_rng(spec.seed, Stream::kSplit);
  auto [train, test] = split_train_test(full, config.test_frac, split_rng);
  return PreparedData{std::move(train), std::move(test)};
}

namespace {

std::vector<SampleIndex> iota_pool(std::size_t n) {
  std::vector<SampleIndex> pool(n);
  std::iota(pool.begin(), pool.end(), SampleIndex{0});
  return pool;
}

ScoreSummary summarize_scores(const Grid& grid, const SelectionResult& sel) {
  std::vector<double> picked;
  picked.reserve(sel.selected.size());
  for (Coord c : sel.selected) picked.push_back(sel.scores[grid.index(c)]);
  std::sort(picked.begin(), picked.end());
  ScoreSummary s;
  s.min = picked.front();
  s.max = picked.back();
  const std::size_t mid = picked.size() / 2;
  s.median = picked.size() % 2 == 1 ? picked[mid]
                                     : 0.5 * (picked[mid - 1] + picked[mid]);
  return s;
}

}  // namespace

Simulation::Simulation(const ExperimentConfig& config, const PreparedData& data,
                       StrategyKind strategy, std::uint64_t seed)
    : config_(config),
      data_(data),
      strategy_kind_(strategy),
      seed_(seed),
      model_(make_model(config.trainer, data.train.n_features(),
                        data.train.n_classes)),
      strategy_(make_strategy(strategy, config.ca)),
      grid_(config.grid_side),
      mobility_rng_(seed, Stream::kMobility),
      capacity_rng_(seed, Stream::kCapacity),
      selection_rng_(seed, Stream::kSelection) {
  config.validate();
  RandomSource init_rng(seed, Stream::kModelInit);
  global_ = model_->initialize(init_rng);

  RandomSource population_rng(seed, Stream::kPopulation);
  const std::vector<SampleIndex> pool = iota_pool(data.train.size());
  population_ = init_population(config.mobility.n_vehicles, config.grid_side,
                                pool, config.mobility.initial_fraction,
                                population_rng);
}

RoundRecord Simulation::run_round() {
  ++round_;
  const int side = config_.grid_side;

  // (1) mobility
  const ArrivalLog arrivals =
      step_mobility(population_, config_.mobility, side, mobility_rng_);
  arrivals_total_ += arrivals.total_samples;
  fallback_total_ += arrivals.fallback_samples;
  const std::size_t held = population_.total_held();
  if (held != population_.initial_allocation + arrivals_total_) {
    throw std::logic_error(
        "sample conservation violated in round " + std::to_string(round_) +
        ": vehicles hold " + std::to_string(held) + ", expected " +
        std::to_string(population_.initial_allocation + arrivals_total_));
  }

  // (2) measurement, (3) CA updates
  const std::vector<CellMeasurement> measured =
      measure_cells(population_.vehicles, arrivals, data_.train.labels,
                    data_.train.n_classes, side);
  grid_ = update_tc(std::move(grid_), config_.ca);
  grid_ = update_npc(std::move(grid_));
  apply_measurements(grid_, measured);
  grid_ = update_cc(std::move(grid_), capacity_rng_);

  // (4) selection, (5) stragglers from the same TC snapshot
  const SelectionResult selection = strategy_->select(grid_, selection_rng_);
  const std::vector<Coord> stragglers = flag_stragglers(grid_, config_.latency);

  // (6) local training, (7) aggregation
  const auto started = std::chrono::steady_clock::now();
  std::vector<std::vector<SampleIndex>> cell_data(grid_.size());
  for (const Vehicle& v : population_.vehicles) {
    auto& bucket = cell_data[grid_.index(v.cell)];
    bucket.insert(bucket.end(), v.shard.begin(), v.shard.end());
  }

  RoundRecord record;
  record.strategy = strategy_kind_;
  record.seed = seed_;
  record.round = round_;
  record.selected = selection.selected;

  std::vector<WeightedUpdate> updates;
  last_weights_.assign(grid_.size(), 0.0);
  for (Coord c : selection.selected) {
    const std::size_t cell = grid_.index(c);
    std::vector<SampleIndex>& rows = cell_data[cell];
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    if (rows.empty()) {
      ++record.empty_selected;
      continue;
    }
    RandomSource train_rng(seed_, Stream::kTraining,
                           static_cast<std::uint64_t>(round_), cell);
    updates.push_back(WeightedUpdate{
        train_local(*model_, global_, data_.train, rows, config_.trainer,
                    train_rng),
        static_cast<double>(rows.size())});
    last_weights_[cell] = static_cast<double>(rows.size());
  }
  if (updates.empty()) {
    record.degenerate = true;
  } else {
    global_ = fedavg(updates);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  double train_seconds = elapsed;
  if (config_.timing == TimingMode::kSimulated) {
    std::int64_t selected_samples = 0;
    for (Coord c : selection.selected) {
      selected_samples += grid_.at(c).sample_quantity;
    }
    train_seconds =
        config_.seconds_per_sample * static_cast<double>(selected_samples);
  }
  record.timing =
      score_round(selection.selected, stragglers, train_seconds, config_.latency);

  // (8) evaluation
  record.metrics = evaluate(*model_, global_, data_.test);

  if (!selection.scores.empty()) {
    record.scores = summarize_scores(grid_, selection);
  }
  record.cell_samples.reserve(grid_.size());
  for (const CellState& cell : grid_.cells()) {
    record.cell_samples.push_back(cell.sample_quantity);
  }
  record.samples_held = held;
  record.initial_allocation = population_.initial_allocation;
  record.arrivals_total = arrivals_total_;
  record.fallback_total = fallback_total_;
  return record;
}

std::vector<RoundRecord> run_simulation(const ExperimentConfig& config,
                                        const PreparedData& data,
                                        StrategyKind strategy,
                                        std::uint64_t seed) {
  Simulation sim(config, data, strategy, seed);
  std::vector<RoundRecord> out;
  out.reserve(static_cast<std::size_t>(config.rounds));
  for (int r = 0; r < config.rounds; ++r) out.push_back(sim.run_round());
  return out;
}

ResultsBundle run_experiment(const ExperimentConfig& config,
                             const ProgressCallback& progress) {
  config.validate();
  const PreparedData data = prepare_data(config);
  return run_experiment(config, data, progress);
}

ResultsBundle run_experiment(const ExperimentConfig& config,
                             const PreparedData& data,
                             const ProgressCallback& progress) {
  config.validate();
  ResultsBundle bundle;
  for (StrategyKind strategy : config.strategies) {
    for (std::uint64_t seed : config.seeds) {
      Simulation sim(config, data, strategy, seed);
      for (int r = 0; r < config.rounds; ++r) {
        RoundRecord record = sim.run_round();
        if (progress) progress(strategy, seed, record);
        bundle.rows.push_back(to_row(record));
        bundle.records.push_back(std::move(record));
      }
    }
  }
  bundle.summary = summarize(bundle.rows);
  return bundle;
}

}  // namespace cafl
