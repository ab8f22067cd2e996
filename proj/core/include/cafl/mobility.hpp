#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cafl/grid.hpp"
#include "cafl/rng.hpp"

namespace cafl {

using SampleIndex = std::uint32_t;

struct Vehicle {
  int id = 0;
  Coord cell;
  // Sorted, duplicate-free indices into the training set. Only ever grows.
  std::vector<SampleIndex> shard;
};

struct MobilityParams {
  int n_vehicles = 100;
  // Fraction of vehicles that relocate each timestep (rounded half-up).
  double move_fraction = 0.2;
  // Samples granted per relocation; 0 means "same as the initial shard size".
  std::size_t arrival_shard_size = 0;
  // Share of the training pool handed out at t=0; the rest feeds arrivals.
  double initial_fraction = 0.5;

  void validate() const;
};

struct Population {
  std::vector<Vehicle> vehicles;
  // Undistributed indices, consumed from the back. Pre-shuffled.
  std::vector<SampleIndex> arrival_pool;
  // Every index the population may ever hold; the with-replacement fallback
  // draws from here once `arrival_pool` is exhausted.
  std::vector<SampleIndex> universe;
  std::size_t initial_allocation = 0;
  std::size_t initial_shard_size = 0;

  std::size_t total_held() const noexcept;
};

struct Arrival {
  int vehicle_id = 0;
  Coord from;
  Coord to;
  std::size_t samples = 0;
  // Samples that came from the with-replacement fallback.
  std::size_t fallback_samples = 0;
};

struct ArrivalLog {
  std::vector<Arrival> arrivals;
  std::size_t total_samples = 0;
  std::size_t fallback_samples = 0;
};

struct CellMeasurement {
  std::int64_t sample_quantity = 0;
  std::int64_t inbound_samples = 0;
  double distribution_quality = 0.0;

  bool operator==(const CellMeasurement&) const = default;
};

/// Places `n_vehicles` uniformly on a `side` x `side` grid and deals each an
/// equal share of a random `initial_fraction` of `pool`. Every vehicle gets at
/// least one sample. Throws ConfigError when the pool is smaller than the
/// population.
Population init_population(int n_vehicles, int side,
                           std::span<const SampleIndex> pool,
                           double initial_fraction, RandomSource& rng);

/// Relocates round-half-up(move_fraction * N) uniformly chosen vehicles, each
/// to a uniformly chosen different cell, and grants each mover
/// `arrival_shard_size` new samples. Throws ConfigError when vehicles must
/// move on a single-cell grid.
ArrivalLog step_mobility(Population& population, const MobilityParams& params,
                         int side, RandomSource& rng);

/// Base-station measurements per cell, row-major. SQ sums the shard sizes of
/// the cell's vehicles, IS the samples granted to vehicles that arrived this
/// step, DQ the population std-dev of the class histogram of everything the
/// cell holds.
std::vector<CellMeasurement> measure_cells(std::span<const Vehicle> vehicles,
                                           const ArrivalLog& arrivals,
                                           std::span<const int> labels,
                                           int n_classes, int side);

// Population standard deviation of `counts`; 0 for an empty span.
double histogram_stddev(std::span<const std::int64_t> counts);

// Writes SQ/IS/DQ into the grid, leaving the other fields alone.
void apply_measurements(Grid& grid, std::span<const CellMeasurement> measured);

}  // namespace cafl
