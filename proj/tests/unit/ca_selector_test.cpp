#include "cafl/ca_selector.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <set>

#include "cafl/errors.hpp"
#include "oracles.hpp"

namespace cafl {
namespace {

TEST(UpdateNpc, ResetsParticipantsAndAgesTheRest) {
  Grid g(2);
  const std::array<bool, 4> pf{true, false, false, true};
  for (std::size_t k = 0; k < 4; ++k) {
    g.cells()[k].participating = pf[k];
    g.cells()[k].non_participation = 3;
  }
  const Grid out = update_npc(g);
  const std::array<std::int64_t, 4> expected{0, 4, 4, 0};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(out.cells()[k].non_participation, expected[k]) << k;
  }
}

TEST(UpdateNpc, SingleCellBranches) {
  Grid g(1);
  g.at(0, 0).participating = true;
  g.at(0, 0).non_participation = 7;
  EXPECT_EQ(update_npc(g).at(0, 0).non_participation, 0);

  g.at(0, 0).participating = false;
  g.at(0, 0).non_participation = 0;
  EXPECT_EQ(update_npc(g).at(0, 0).non_participation, 1);
}

TEST(UpdateNpc, LeavesOtherFieldsAlone) {
  RandomSource rng(3);
  const Grid g = oracle::random_grid(4, rng);
  const Grid out = update_npc(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CellState a = g.cells()[k];
    CellState b = out.cells()[k];
    a.non_participation = b.non_participation = 0;
    EXPECT_EQ(a, b);
  }
}

TEST(UpdateCc, ForcedDraws) {
  Grid g(1);
  g.at(0, 0).sample_quantity = 0;
  EXPECT_EQ(update_cc(g, std::array{0.7}).at(0, 0).capacity, 0.0);
  g.at(0, 0).sample_quantity = 100;
  EXPECT_EQ(update_cc(g, std::array{1.0}).at(0, 0).capacity, 100.0);
  g.at(0, 0).sample_quantity = 80;
  EXPECT_EQ(update_cc(g, std::array{0.25}).at(0, 0).capacity, 20.0);
}

TEST(UpdateCc, ConsumesDrawsRowMajor) {
  RandomSource rng(11);
  Grid g = oracle::random_grid(3, rng);
  RandomSource a(99), b(99);
  const Grid out = update_cc(g, a);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double d = b.uniform();
    EXPECT_EQ(out.cells()[k].capacity,
              d * static_cast<double>(g.cells()[k].sample_quantity));
    EXPECT_LE(out.cells()[k].capacity,
              static_cast<double>(g.cells()[k].sample_quantity));
  }
}

TEST(UpdateTc, NoParticipantsNoCongestion) {
  RandomSource rng(5);
  Grid g = oracle::random_grid(4, rng);
  for (CellState& c : g.cells()) c.participating = false;
  for (const CellState& c : update_tc(g, CaParams{}).cells()) {
    EXPECT_EQ(c.congestion, 0.0);
  }
}

TEST(UpdateTc, IsolatedCentreSpreadsToItsNeighbourhood) {
  CaParams p;
  Grid g(3);
  g.at(1, 1).participating = true;
  g.at(1, 1).sample_quantity = 10;
  g.at(0, 0).sample_quantity = 50;  // non-participating load is ignored
  const Grid out = update_tc(g, p);
  EXPECT_EQ(out.at(1, 1).congestion, 10.0);
  for (Coord c : {Coord{0, 1}, Coord{1, 0}, Coord{1, 2}, Coord{2, 1}}) {
    EXPECT_EQ(out.at(c).congestion, p.von_neumann_weight * 10.0);
  }
  for (Coord c : {Coord{0, 0}, Coord{0, 2}, Coord{2, 0}, Coord{2, 2}}) {
    EXPECT_EQ(out.at(c).congestion, p.diagonal_weight * 10.0);
  }
}

TEST(UpdateTc, CornerSeesOnlyInGridNeighbours) {
  CaParams p;
  p.von_neumann_weight = 0.5;
  p.diagonal_weight = 0.25;
  Grid g(3);
  for (CellState& c : g.cells()) {
    c.participating = true;
    c.sample_quantity = 1;
  }
  const Grid out = update_tc(g, p);
  EXPECT_EQ(out.at(0, 0).congestion, 2.25);
  EXPECT_EQ(out.at(1, 1).congestion, 1 + 0.5 * 4 + 0.25 * 4);
}

TEST(UpdateTc, ChangesAreLocalToTheMooreNeighbourhood) {
  RandomSource rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int side = 2 + static_cast<int>(rng.uniform_index(5));
    Grid g = oracle::random_grid(side, rng);
    const Grid before = update_tc(g, CaParams{});
    const Coord poke = g.coord(rng.uniform_index(g.size()));
    g.at(poke).participating = true;
    g.at(poke).sample_quantity += 17;
    const Grid after = update_tc(g, CaParams{});
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Coord c = g.coord(k);
      const bool near =
          std::abs(c.row - poke.row) <= 1 && std::abs(c.col - poke.col) <= 1;
      if (!near) {
        EXPECT_EQ(before.cells()[k].congestion, after.cells()[k].congestion);
      }
      EXPECT_GE(after.cells()[k].congestion, 0.0);
    }
  }
}

TEST(UpdateTc, MatchesNeighbourEnumeration) {
  RandomSource rng(1234);
  CaParams p;
  for (int trial = 0; trial < 200; ++trial) {
    const int side = 1 + static_cast<int>(rng.uniform_index(4));
    const Grid g = oracle::random_grid(side, rng);
    const Grid out = update_tc(g, p);
    const auto expected =
        oracle::congestion(g, p.von_neumann_weight, p.diagonal_weight);
    for (std::size_t k = 0; k < g.size(); ++k) {
      ASSERT_EQ(out.cells()[k].congestion, expected[k]);
    }
  }
}

TEST(CellScore, EmptyCellScoresZero) {
  CellState c;
  c.non_participation = 9;
  c.distribution_quality = 0.0;
  EXPECT_EQ(cell_score(c, CaParams{}), 0.0);
}

TEST(CellScore, DefaultWeightsWorkedExample) {
  CellState c;
  c.sample_quantity = 50;
  c.inbound_samples = 50;
  c.non_participation = 0;
  c.distribution_quality = 1.0;
  c.capacity = 25.0;
  c.congestion = 50.0;
  EXPECT_NEAR(cell_score(c, CaParams{}), 0.33, 1e-12);
}

TEST(CellScore, ZeroCongestionUsesTheFloor) {
  CaParams p;
  CellState c;
  c.sample_quantity = 10;
  c.non_participation = 1;
  c.distribution_quality = 2.0;
  c.capacity = 5.0;
  c.congestion = 0.0;
  EXPECT_NEAR(cell_score(c, p), (0.33 + 0.33 / 2.0) * 5.0 / p.tc_floor, 1e-12);
}

TEST(CellScore, MonotoneInEachInput) {
  RandomSource rng(8);
  const CaParams p;
  for (int trial = 0; trial < 500; ++trial) {
    CellState c;
    c.sample_quantity = 1 + static_cast<std::int64_t>(rng.uniform_index(200));
    c.inbound_samples = static_cast<std::int64_t>(
        rng.uniform_index(static_cast<std::size_t>(c.sample_quantity)));
    c.non_participation = static_cast<std::int64_t>(rng.uniform_index(10));
    c.distribution_quality = 0.1 + 20.0 * rng.uniform();
    c.capacity = rng.uniform() * static_cast<double>(c.sample_quantity);
    c.congestion = 300.0 * rng.uniform();
    const double base = cell_score(c, p);

    CellState more = c;
    ++more.non_participation;
    EXPECT_GE(cell_score(more, p), base);
    more = c;
    if (more.inbound_samples < more.sample_quantity) ++more.inbound_samples;
    EXPECT_GE(cell_score(more, p), base);
    more = c;
    more.capacity = std::min(more.capacity + 1.0, double(more.sample_quantity));
    EXPECT_GE(cell_score(more, p), base);
    more = c;
    more.congestion += 5.0;
    EXPECT_LE(cell_score(more, p), base);
    more = c;
    more.distribution_quality += 1.0;
    EXPECT_LE(cell_score(more, p), base);
  }
}

TEST(CellScore, StalenessRaisesScore) {
  CellState c;
  c.sample_quantity = 40;
  c.inbound_samples = 4;
  c.distribution_quality = 3.0;
  c.capacity = 20.0;
  c.congestion = 12.0;
  CellState stale = c;
  stale.non_participation = 5;
  EXPECT_GT(cell_score(stale, CaParams{}), cell_score(c, CaParams{}));
}

TEST(FractionCount, RoundsHalfUp) {
  EXPECT_EQ(fraction_count(0.4, 25), 10u);
  EXPECT_EQ(fraction_count(0.2, 25), 5u);
  EXPECT_EQ(fraction_count(0.3, 5), 2u);   // 1.5
  EXPECT_EQ(fraction_count(0.1, 4), 0u);   // 0.4
  EXPECT_EQ(fraction_count(0.125, 4), 1u); // 0.5
  EXPECT_EQ(fraction_count(1.0, 16), 16u);
}

TEST(SelectCa, FiveByFiveGridSelectsTen) {
  RandomSource rng(2);
  Grid g = oracle::random_grid(5, rng);
  const SelectionResult r = select_ca(g, CaParams{});
  EXPECT_EQ(r.selected.size(), 10u);
  EXPECT_EQ(r.scores.size(), 25u);
}

TEST(SelectCa, AllEqualScoresPickRowMajorFirst) {
  Grid g(5);
  const SelectionResult r = select_ca(g, CaParams{});  // every score is 0
  ASSERT_EQ(r.selected.size(), 10u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(r.selected[k], g.coord(k));
}

TEST(SelectCa, StrictlyDecreasingScoresPickThePrefix) {
  Grid g(4);
  CaParams p;
  p.select_fraction = 0.5;
  for (std::size_t k = 0; k < g.size(); ++k) {
    CellState& c = g.cells()[k];
    c.sample_quantity = 100;
    c.non_participation = 1;
    c.distribution_quality = 1.0;
    c.capacity = static_cast<double>(100 - k);
  }
  const SelectionResult r = select_ca(g, p);
  ASSERT_EQ(r.selected.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(r.selected[k], g.coord(k));
}

TEST(SelectCa, WritesParticipationFlags) {
  RandomSource rng(4);
  Grid g = oracle::random_grid(5, rng);
  const SelectionResult r = select_ca(g, CaParams{});
  const std::set<Coord> chosen(r.selected.begin(), r.selected.end());
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_EQ(g.cells()[k].participating, chosen.contains(g.coord(k)));
  }
}

TEST(SelectCa, RejectsFractionThatRoundsToZero) {
  Grid g(2);
  CaParams p;
  p.select_fraction = 0.1;
  EXPECT_THROW(select_ca(g, p), ConfigError);
}

TEST(SelectCa, ArgmaxConsistencyAndOracle) {
  RandomSource rng(77);
  CaParams p;
  for (int trial = 0; trial < 300; ++trial) {
    const int side = 1 + static_cast<int>(rng.uniform_index(4));
    Grid g = oracle::random_grid(side, rng);
    const Grid snapshot = g;
    const std::size_t n = fraction_count(p.select_fraction, g.size());
    if (n == 0) continue;
    const SelectionResult r = select_ca(g, p);
    std::vector<std::size_t> got;
    for (Coord c : r.selected) got.push_back(g.index(c));
    EXPECT_EQ(got, oracle::select(snapshot, p, n));

    double worst_selected = 1e300;
    for (std::size_t k : got) worst_selected = std::min(worst_selected, r.scores[k]);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (std::find(got.begin(), got.end(), k) == got.end()) {
        EXPECT_LE(r.scores[k], worst_selected);
      }
    }
  }
}

TEST(SelectRandom, ExhaustiveSelection) {
  RandomSource rng(1);
  const SelectionResult r = select_random(5, 25, rng);
  EXPECT_EQ(r.selected.size(), 25u);
  EXPECT_TRUE(r.scores.empty());
  const std::set<Coord> unique(r.selected.begin(), r.selected.end());
  EXPECT_EQ(unique.size(), 25u);
}

TEST(SelectRandom, DeterministicForASeed) {
  RandomSource a(42), b(42);
  EXPECT_EQ(select_random(5, 10, a).selected, select_random(5, 10, b).selected);
}

TEST(SelectRandom, RejectsTooMany) {
  RandomSource rng(1);
  EXPECT_THROW(select_random(5, 26, rng), ConfigError);
  EXPECT_THROW(sample_without_replacement(5, 0, rng), ConfigError);
}

TEST(SelectRandom, UniformFrequencies) {
  RandomSource rng(2024);
  std::array<int, 5> hits{};
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    for (std::size_t k : sample_without_replacement(5, 2, rng)) ++hits[k];
  }
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / trials, 0.4, 0.02);
}

TEST(CaParams, Validation) {
  CaParams p;
  EXPECT_NO_THROW(p.validate());
  p.diagonal_weight = 0.75;
  EXPECT_THROW(p.validate(), ConfigError);
  p = CaParams{};
  p.select_fraction = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p.select_fraction = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Strategy, InterfaceDispatch) {
  const CaParams p;
  RandomSource rng(9);
  Grid g = oracle::random_grid(5, rng);
  auto ca = make_strategy(StrategyKind::kCaCs, p);
  auto random = make_strategy(StrategyKind::kRandom, p);
  EXPECT_EQ(ca->kind(), StrategyKind::kCaCs);
  EXPECT_EQ(ca->select(g, rng).selected.size(), 10u);
  const SelectionResult r = random->select(g, rng);
  EXPECT_EQ(r.selected.size(), 10u);
  std::size_t flagged = 0;
  for (const CellState& c : g.cells()) flagged += c.participating;
  EXPECT_EQ(flagged, 10u);
  EXPECT_EQ(parse_strategy("ca_cs"), StrategyKind::kCaCs);
  EXPECT_THROW(parse_strategy("ucb"), ConfigError);
}

}  // namespace
}  // namespace cafl
