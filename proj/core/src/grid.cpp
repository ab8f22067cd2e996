#include "cafl/grid.hpp"

#include <array>
#include <string>

#include "cafl/errors.hpp"

namespace cafl {

Grid::Grid(int side) : side_(side) {
  if (side < 1) {
    throw ConfigError("grid side must be positive, got " + std::to_string(side));
  }
  cells_.resize(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
}

namespace {

template <std::size_t N>
std::vector<Coord> in_grid(const Grid& grid, Coord c,
                           const std::array<std::array<int, 2>, N>& offsets) {
  std::vector<Coord> out;
  out.reserve(N);
  for (const auto& [dr, dc] : offsets) {
    if (grid.contains(c.row + dr, c.col + dc)) {
      out.push_back(Coord{c.row + dr, c.col + dc});
    }
  }
  return out;
}

}  // namespace

std::vector<Coord> Grid::von_neumann_neighbors(Coord c) const {
  static constexpr std::array<std::array<int, 2>, 4> kOffsets{
      {{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
  return in_grid(*this, c, kOffsets);
}

std::vector<Coord> Grid::diagonal_neighbors(Coord c) const {
  static constexpr std::array<std::array<int, 2>, 4> kOffsets{
      {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}};
  return in_grid(*this, c, kOffsets);
}

}  // namespace cafl
