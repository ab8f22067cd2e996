#include <benchmark/benchmark.h>

#include "cafl/ca_selector.hpp"
#include "cafl/latency.hpp"

namespace {

cafl::Grid busy_grid(int side) {
  cafl::RandomSource rng(1);
  cafl::Grid g(side);
  for (cafl::CellState& c : g.cells()) {
    c.participating = rng.uniform() < 0.4;
    c.sample_quantity = static_cast<std::int64_t>(rng.uniform_index(500));
    c.inbound_samples = c.sample_quantity / 4;
    c.non_participation = static_cast<std::int64_t>(rng.uniform_index(5));
    c.distribution_quality = 10.0 * rng.uniform();
    c.capacity = rng.uniform() * static_cast<double>(c.sample_quantity);
  }
  return g;
}

void BM_UpdateTc(benchmark::State& state) {
  const cafl::Grid g = busy_grid(static_cast<int>(state.range(0)));
  const cafl::CaParams params;
  for (auto _ : state) benchmark::DoNotOptimize(cafl::update_tc(g, params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_UpdateTc)->Arg(5)->Arg(32)->Arg(128);

void BM_SelectCa(benchmark::State& state) {
  const cafl::CaParams params;
  cafl::Grid g = cafl::update_tc(busy_grid(static_cast<int>(state.range(0))), params);
  for (auto _ : state) benchmark::DoNotOptimize(cafl::select_ca(g, params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_SelectCa)->Arg(5)->Arg(32)->Arg(128);

void BM_FlagStragglers(benchmark::State& state) {
  const cafl::Grid g =
      cafl::update_tc(busy_grid(static_cast<int>(state.range(0))), cafl::CaParams{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(cafl::flag_stragglers(g, cafl::LatencyParams{}));
  }
}
BENCHMARK(BM_FlagStragglers)->Arg(5)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
