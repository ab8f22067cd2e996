#include "cafl/latency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cafl/ca_selector.hpp"
#include "cafl/errors.hpp"

namespace cafl {

std::string_view to_string(PenaltyMode mode) noexcept {
  switch (mode) {
    case PenaltyMode::kPerStraggler:
      return "per_straggler";
    case PenaltyMode::kOncePerRound:
      return "once_per_round";
  }
  return "unknown";
}

PenaltyMode parse_penalty_mode(std::string_view name) {
  if (name == "per_straggler") return PenaltyMode::kPerStraggler;
  if (name == "once_per_round") return PenaltyMode::kOncePerRound;
  throw ConfigError("unknown penalty mode '" + std::string(name) +
                    "' (expected per_straggler or once_per_round)");
}

void LatencyParams::validate() const {
  if (!(straggler_fraction > 0.0 && straggler_fraction < 1.0)) {
    throw ConfigError("latency: straggler_fraction must lie in (0, 1)");
  }
  if (!(penalty_seconds >= 0.0) || !std::isfinite(penalty_seconds)) {
    throw ConfigError("latency: penalty_seconds must be finite and >= 0");
  }
}

std::vector<Coord> flag_stragglers(std::span<const double> congestion, int side,
                                   const LatencyParams& params) {
  const Grid shape(side);
  if (congestion.size() != shape.size()) {
    throw ContractViolation("flag_stragglers: need one TC value per cell");
  }
  std::vector<std::size_t> top = top_n_indices(
      congestion, fraction_count(params.straggler_fraction, shape.size()));
  std::sort(top.begin(), top.end());
  std::vector<Coord> out;
  out.reserve(top.size());
  for (std::size_t k : top) out.push_back(shape.coord(k));
  return out;
}

std::vector<Coord> flag_stragglers(const Grid& grid, const LatencyParams& params) {
  std::vector<double> congestion;
  congestion.reserve(grid.size());
  for (const CellState& cell : grid.cells()) congestion.push_back(cell.congestion);
  return flag_stragglers(congestion, grid.side(), params);
}

RoundTiming score_round(std::span<const Coord> selected,
                        std::span<const Coord> stragglers, double train_seconds,
                        const LatencyParams& params) {
  RoundTiming timing;
  timing.stragglers.assign(stragglers.begin(), stragglers.end());
  for (const Coord& c : selected) {
    if (std::find(stragglers.begin(), stragglers.end(), c) != stragglers.end()) {
      ++timing.stragglers_selected;
    }
  }
  const double hits =
      params.mode == PenaltyMode::kPerStraggler
          ? static_cast<double>(timing.stragglers_selected)
          : (timing.stragglers_selected > 0 ? 1.0 : 0.0);
  timing.penalty_seconds = hits * params.penalty_seconds;
  timing.train_seconds = train_seconds;
  timing.total_seconds = train_seconds + timing.penalty_seconds;
  return timing;
}

}  // namespace cafl
