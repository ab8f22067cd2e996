#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cafl {

struct Coord {
  int row = 0;
  int col = 0;

  auto operator<=>(const Coord&) const = default;
};

/// State of one cell (one base station / FL client) of the automaton.
///
///   participating        PF   selected in the most recent round
///   sample_quantity      SQ   samples registered at the base station
///   non_participation    NPC  consecutive rounds not selected
///   inbound_samples      IS   samples that arrived at the cell this timestep
///   congestion           TC   throughput congestion, in sample units
///   capacity             CC   computational capacity, SQ scaled by d in [0,1]
///   distribution_quality DQ   std-dev of the cell's per-class sample counts
struct CellState {
  bool participating = false;
  std::int64_t sample_quantity = 0;
  std::int64_t non_participation = 0;
  std::int64_t inbound_samples = 0;
  double congestion = 0.0;
  double capacity = 0.0;
  double distribution_quality = 0.0;

  bool operator==(const CellState&) const = default;
};

/// Square lattice of cells stored row-major. Out-of-grid neighbours do not
/// exist: neighbourhood queries only ever visit in-grid cells.
class Grid {
 public:
  explicit Grid(int side);

  int side() const noexcept { return side_; }
  std::size_t size() const noexcept { return cells_.size(); }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < side_ && col < side_;
  }

  std::size_t index(Coord c) const noexcept {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(side_) +
           static_cast<std::size_t>(c.col);
  }
  Coord coord(std::size_t index) const noexcept {
    return Coord{static_cast<int>(index / static_cast<std::size_t>(side_)),
                 static_cast<int>(index % static_cast<std::size_t>(side_))};
  }

  CellState& at(Coord c) { return cells_[index(c)]; }
  const CellState& at(Coord c) const { return cells_[index(c)]; }
  CellState& at(int row, int col) { return at(Coord{row, col}); }
  const CellState& at(int row, int col) const { return at(Coord{row, col}); }

  std::span<CellState> cells() noexcept { return cells_; }
  std::span<const CellState> cells() const noexcept { return cells_; }

  // Edge-adjacent in-grid neighbours (Von Neumann, up to 4).
  std::vector<Coord> von_neumann_neighbors(Coord c) const;
  // Diagonal in-grid neighbours (the Moore cells not in Von Neumann, up to 4).
  std::vector<Coord> diagonal_neighbors(Coord c) const;

  bool operator==(const Grid&) const = default;

 private:
  int side_;
  std::vector<CellState> cells_;
};

}  // namespace cafl
