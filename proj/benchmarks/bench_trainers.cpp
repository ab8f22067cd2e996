#include <benchmark/benchmark.h>

#include <numeric>

#include "cafl/dataset.hpp"
#include "cafl/fedavg.hpp"
#include "cafl/model.hpp"

namespace {

const cafl::Dataset& digits_like() {
  static const cafl::Dataset data = [] {
    cafl::RandomSource rng(3);
    return cafl::synth_dataset(2000, 784, 10, rng);
  }();
  return data;
}

void train(benchmark::State& state, cafl::TrainerKind kind) {
  const cafl::Dataset& data = digits_like();
  cafl::TrainerSpec spec;
  spec.kind = kind;
  spec.local_epochs = 1;
  const auto model = cafl::make_model(spec, data.n_features(), data.n_classes);
  cafl::RandomSource rng(4);
  const cafl::ModelParams start = model->initialize(rng);
  std::vector<std::uint32_t> rows(static_cast<std::size_t>(state.range(0)));
  std::iota(rows.begin(), rows.end(), 0u);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cafl::train_local(*model, start, data, rows, spec, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrainLogistic(benchmark::State& state) {
  train(state, cafl::TrainerKind::kLogisticRegression);
}
BENCHMARK(BM_TrainLogistic)->Arg(256)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_TrainMlp(benchmark::State& state) { train(state, cafl::TrainerKind::kMlp); }
BENCHMARK(BM_TrainMlp)->Arg(256)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FedAvg(benchmark::State& state) {
  cafl::RandomSource rng(5);
  std::vector<cafl::WeightedUpdate> updates(10);
  for (auto& u : updates) {
    u.params.values.resize(static_cast<std::size_t>(state.range(0)));
    for (double& v : u.params.values) v = rng.normal();
    u.weight = 100.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(cafl::fedavg(updates));
}
BENCHMARK(BM_FedAvg)->Arg(7850)->Arg(101770);

}  // namespace

BENCHMARK_MAIN();
