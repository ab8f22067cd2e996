#include "cafl/ca_selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cafl/errors.hpp"

namespace cafl {

void CaParams::validate() const {
  const auto finite_non_negative = [](double v) {
    return std::isfinite(v) && v >= 0.0;
  };
  if (!finite_non_negative(freshness_weight) ||
      !finite_non_negative(staleness_weight) ||
      !finite_non_negative(balance_weight)) {
    throw ConfigError("ca: score weights must be finite and non-negative");
  }
  if (!finite_non_negative(von_neumann_weight) ||
      !finite_non_negative(diagonal_weight)) {
    throw ConfigError("ca: neighbour weights must be finite and non-negative");
  }
  if (von_neumann_weight < diagonal_weight) {
    throw ConfigError(
        "ca: von_neumann_weight must be >= diagonal_weight");
  }
  if (!(select_fraction > 0.0 && select_fraction <= 1.0)) {
    throw ConfigError("ca: select_fraction must lie in (0, 1]");
  }
  if (!(dq_floor > 0.0) || !(tc_floor > 0.0) || !std::isfinite(dq_floor) ||
      !std::isfinite(tc_floor)) {
    throw ConfigError("ca: dq_floor and tc_floor must be positive");
  }
}

std::size_t fraction_count(double fraction, std::size_t cells) noexcept {
  // The small slack absorbs representation error, e.g. 0.3 * 5 = 1.4999...
  const double x = fraction * static_cast<double>(cells);
  const double rounded = std::floor(x + 0.5 + 1e-9);
  return rounded <= 0.0 ? 0 : static_cast<std::size_t>(rounded);
}

Grid update_npc(Grid grid) {
  for (CellState& cell : grid.cells()) {
    cell.non_participation = cell.participating ? 0 : cell.non_participation + 1;
  }
  return grid;
}

Grid update_cc(Grid grid, RandomSource& rng) {
  std::vector<double> draws(grid.size());
  for (double& d : draws) d = rng.uniform();
  return update_cc(std::move(grid), draws);
}

Grid update_cc(Grid grid, std::span<const double> draws) {
  if (draws.size() != grid.size()) {
    throw ContractViolation("update_cc: need one draw per cell");
  }
  auto cells = grid.cells();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    cells[k].capacity =
        draws[k] * static_cast<double>(cells[k].sample_quantity);
  }
  return grid;
}

Grid update_tc(Grid grid, const CaParams& params) {
  const int side = grid.side();
  // Participating load PF*SQ of the previous snapshot.
  std::vector<double> load(grid.size());
  for (std::size_t k = 0; k < load.size(); ++k) {
    const CellState& cell = grid.cells()[k];
    load[k] = cell.participating ? static_cast<double>(cell.sample_quantity)
                                 : 0.0;
  }
  const auto load_at = [&](int r, int c) {
    return grid.contains(r, c)
               ? load[static_cast<std::size_t>(r * side + c)]
               : 0.0;
  };

  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double orthogonal = load_at(r - 1, c) + load_at(r + 1, c) +
                                load_at(r, c - 1) + load_at(r, c + 1);
      const double diagonal = load_at(r - 1, c - 1) + load_at(r - 1, c + 1) +
                              load_at(r + 1, c - 1) + load_at(r + 1, c + 1);
      grid.at(r, c).congestion = load_at(r, c) +
                                 params.von_neumann_weight * orthogonal +
                                 params.diagonal_weight * diagonal;
    }
  }
  return grid;
}

double cell_score(const CellState& cell, const CaParams& params) {
  const double freshness =
      cell.sample_quantity > 0
          ? static_cast<double>(cell.inbound_samples) /
                static_cast<double>(cell.sample_quantity)
          : 0.0;
  const double drive =
      params.freshness_weight * freshness +
      params.staleness_weight * static_cast<double>(cell.non_participation) +
      params.balance_weight /
          std::max(cell.distribution_quality, params.dq_floor);
  return drive * cell.capacity / std::max(cell.congestion, params.tc_floor);
}

std::vector<std::size_t> top_n_indices(std::span<const double> values,
                                       std::size_t n) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  n = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (values[a] != values[b]) return values[a] > values[b];
                      return a < b;
                    });
  order.resize(n);
  return order;
}

namespace {

std::vector<Coord> sorted_coords(const Grid& grid,
                                 std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  std::vector<Coord> out;
  out.reserve(indices.size());
  for (std::size_t k : indices) out.push_back(grid.coord(k));
  return out;
}

}  // namespace

SelectionResult select_ca(Grid& grid, const CaParams& params) {
  const std::size_t n = fraction_count(params.select_fraction, grid.size());
  if (n == 0) {
    throw ConfigError("select_fraction " +
                      std::to_string(params.select_fraction) +
                      " selects no cells on a grid of " +
                      std::to_string(grid.size()));
  }
  SelectionResult result;
  result.scores.reserve(grid.size());
  for (const CellState& cell : grid.cells()) {
    result.scores.push_back(cell_score(cell, params));
  }
  result.selected = sorted_coords(grid, top_n_indices(result.scores, n));
  apply_selection(grid, result);
  return result;
}

std::vector<std::size_t> sample_without_replacement(std::size_t k,
                                                    std::size_t n,
                                                    RandomSource& rng) {
  if (n < 1 || n > k) {
    throw ConfigError("random selection needs 1 <= n <= " + std::to_string(k) +
                      ", got " + std::to_string(n));
  }
  // Partial Fisher-Yates: the first n slots end up a uniform n-subset.
  std::vector<std::size_t> pool(k);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_index(k - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

SelectionResult select_random(int side, std::size_t n, RandomSource& rng) {
  const Grid shape(side);
  SelectionResult result;
  result.selected =
      sorted_coords(shape, sample_without_replacement(shape.size(), n, rng));
  return result;
}

void apply_selection(Grid& grid, const SelectionResult& result) {
  for (CellState& cell : grid.cells()) cell.participating = false;
  for (Coord c : result.selected) grid.at(c).participating = true;
}

std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::kCaCs:
      return "ca_cs";
    case StrategyKind::kRandom:
      return "random";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  if (name == "ca_cs") return StrategyKind::kCaCs;
  if (name == "random") return StrategyKind::kRandom;
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected ca_cs or random)");
}

CaSelector::CaSelector(CaParams params) : params_(params) {
  params_.validate();
}

SelectionResult CaSelector::select(Grid& grid, RandomSource& /*rng*/) {
  return select_ca(grid, params_);
}

RandomSelector::RandomSelector(double select_fraction)
    : select_fraction_(select_fraction) {}

SelectionResult RandomSelector::select(Grid& grid, RandomSource& rng) {
  SelectionResult result = select_random(
      grid.side(), fraction_count(select_fraction_, grid.size()), rng);
  apply_selection(grid, result);
  return result;
}

std::unique_ptr<SelectionStrategy> make_strategy(StrategyKind kind,
                                                 const CaParams& params) {
  switch (kind) {
    case StrategyKind::kCaCs:
      return std::make_unique<CaSelector>(params);
    case StrategyKind::kRandom:
      return std::make_unique<RandomSelector>(params.select_fraction);
  }
  throw ConfigError("unknown strategy");
}

}  // namespace cafl
