#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cafl/grid.hpp"

namespace cafl {

enum class PenaltyMode {
  kPerStraggler,  // penalty for every selected straggler
  kOncePerRound,  // one penalty if any straggler is selected
};

std::string_view to_string(PenaltyMode mode) noexcept;
PenaltyMode parse_penalty_mode(std::string_view name);

struct LatencyParams {
  double straggler_fraction = 0.2;
  double penalty_seconds = 5.0;
  PenaltyMode mode = PenaltyMode::kPerStraggler;

  void validate() const;
};

struct RoundTiming {
  std::vector<Coord> stragglers;
  std::size_t stragglers_selected = 0;
  double penalty_seconds = 0.0;
  double train_seconds = 0.0;
  double total_seconds = 0.0;
};

/// The round-half-up(straggler_fraction * K) cells with the highest TC,
/// row-major-first on ties, returned sorted row-major. `congestion` holds
/// one TC value per cell of a `side` x `side` grid.
std::vector<Coord> flag_stragglers(std::span<const double> congestion, int side,
                                   const LatencyParams& params);

// Convenience overload reading TC from the grid.
std::vector<Coord> flag_stragglers(const Grid& grid, const LatencyParams& params);

RoundTiming score_round(std::span<const Coord> selected,
                        std::span<const Coord> stragglers, double train_seconds,
                        const LatencyParams& params);

}  // namespace cafl
