#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "cafl/grid.hpp"
#include "cafl/rng.hpp"

namespace cafl {

/// Weights of the cell score and of the congestion neighbourhood.
///
/// score = (freshness_weight * IS/SQ + staleness_weight * NPC
///          + balance_weight / max(DQ, dq_floor)) * CC / max(TC, tc_floor)
struct CaParams {
  double freshness_weight = 0.33;  // alpha, on IS/SQ
  double staleness_weight = 0.33;  // beta, on NPC
  double balance_weight = 0.33;    // gamma, on 1/DQ
  double von_neumann_weight = 0.5;
  double diagonal_weight = 0.25;
  double select_fraction = 0.4;
  double dq_floor = 1e-6;
  double tc_floor = 1.0;

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

struct SelectionResult {
  // Distinct in-grid cells, sorted row-major.
  std::vector<Coord> selected;
  // Score of every cell indexed row-major; empty for random selection.
  std::vector<double> scores;
};

// round-half-up(fraction * cells). May be zero; callers decide whether that is
// acceptable.
std::size_t fraction_count(double fraction, std::size_t cells) noexcept;

// NPC' = 0 for participating cells, NPC + 1 otherwise.
Grid update_npc(Grid grid);

// CC' = d * SQ, one d ~ U[0,1) per cell drawn from `rng` in row-major order.
Grid update_cc(Grid grid, RandomSource& rng);
// Same rule with caller-supplied draws (one per cell, row-major).
Grid update_cc(Grid grid, std::span<const double> draws);

// TC' = PF*SQ + e * sum_{Von Neumann} PF*SQ + m * sum_{diagonal} PF*SQ, read
// from the input snapshot. Cells beyond the edge contribute nothing.
Grid update_tc(Grid grid, const CaParams& params);

double cell_score(const CellState& cell, const CaParams& params);

// Indices of the `n` largest values, ordered by value descending and then by
// index ascending.
std::vector<std::size_t> top_n_indices(std::span<const double> values,
                                       std::size_t n);

/// Scores every cell, selects the top round(select_fraction * K), and rewrites
/// PF (1 for selected, 0 otherwise). Ties go to the row-major-first cell.
/// Throws ConfigError when the fraction rounds to zero cells.
SelectionResult select_ca(Grid& grid, const CaParams& params);

/// `n` distinct indices from [0, k), uniformly without replacement, sorted.
/// Throws ConfigError unless 1 <= n <= k.
std::vector<std::size_t> sample_without_replacement(std::size_t k,
                                                    std::size_t n,
                                                    RandomSource& rng);

// `n` distinct cells of a `side` x `side` grid; scores left empty.
SelectionResult select_random(int side, std::size_t n, RandomSource& rng);

// Sets PF=1 on the selected cells and PF=0 elsewhere.
void apply_selection(Grid& grid, const SelectionResult& result);

enum class StrategyKind { kCaCs, kRandom };

std::string_view to_string(StrategyKind kind) noexcept;
// Accepts "ca_cs" and "random"; throws ConfigError otherwise.
StrategyKind parse_strategy(std::string_view name);

/// Common interface of the client-selection strategies. Implementations
/// update PF on the grid they are handed.
class SelectionStrategy {
 public:
  virtual ~SelectionStrategy() = default;
  virtual StrategyKind kind() const noexcept = 0;
  virtual SelectionResult select(Grid& grid, RandomSource& rng) = 0;
};

class CaSelector final : public SelectionStrategy {
 public:
  explicit CaSelector(CaParams params);
  StrategyKind kind() const noexcept override { return StrategyKind::kCaCs; }
  SelectionResult select(Grid& grid, RandomSource& rng) override;

 private:
  CaParams params_;
};

class RandomSelector final : public SelectionStrategy {
 public:
  explicit RandomSelector(double select_fraction);
  StrategyKind kind() const noexcept override { return StrategyKind::kRandom; }
  SelectionResult select(Grid& grid, RandomSource& rng) override;

 private:
  double select_fraction_;
};

std::unique_ptr<SelectionStrategy> make_strategy(StrategyKind kind,
                                                 const CaParams& params);

}  // namespace cafl
