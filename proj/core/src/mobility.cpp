#include "cafl/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <string>
#include <tuple>

#include "cafl/ca_selector.hpp"
#include "cafl/errors.hpp"

namespace cafl {

void MobilityParams::validate() const {
  if (n_vehicles < 1) throw ConfigError("mobility: n_vehicles must be >= 1");
  if (!(move_fraction >= 0.0 && move_fraction <= 1.0)) {
    throw ConfigError("mobility: move_fraction must lie in [0, 1]");
  }
  if (!(initial_fraction > 0.0 && initial_fraction <= 1.0)) {
    throw ConfigError("mobility: initial_fraction must lie in (0, 1]");
  }
}

std::size_t Population::total_held() const noexcept {
  std::size_t total = 0;
  for (const Vehicle& v : vehicles) total += v.shard.size();
  return total;
}

Population init_population(int n_vehicles, int side,
                           std::span<const SampleIndex> pool,
                           double initial_fraction, RandomSource& rng) {
  if (n_vehicles < 1) throw ConfigError("init_population: no vehicles");
  if (pool.size() < static_cast<std::size_t>(n_vehicles)) {
    throw ConfigError("init_population: pool of " + std::to_string(pool.size()) +
                      " samples cannot seed " + std::to_string(n_vehicles) +
                      " vehicles");
  }
  const Grid shape(side);
  const auto n = static_cast<std::size_t>(n_vehicles);

  Population population;
  population.universe.assign(pool.begin(), pool.end());

  std::vector<SampleIndex> shuffled(pool.begin(), pool.end());
  rng.shuffle(std::span<SampleIndex>(shuffled));

  const auto initial_count = static_cast<std::size_t>(
      std::floor(initial_fraction * static_cast<double>(pool.size())));
  const std::size_t shard_size = std::max<std::size_t>(1, initial_count / n);

  population.vehicles.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    Vehicle& v = population.vehicles[k];
    v.id = static_cast<int>(k);
    v.cell = shape.coord(rng.uniform_index(shape.size()));
    const auto first = shuffled.begin() + static_cast<std::ptrdiff_t>(k * shard_size);
    v.shard.assign(first, first + static_cast<std::ptrdiff_t>(shard_size));
    std::sort(v.shard.begin(), v.shard.end());
  }
  population.initial_shard_size = shard_size;
  population.initial_allocation = shard_size * n;
  population.arrival_pool.assign(
      shuffled.begin() + static_cast<std::ptrdiff_t>(population.initial_allocation),
      shuffled.end());
  return population;
}

namespace {

// Draws up to `count` indices not yet in `vehicle.shard` and merges them in.
// Returns (granted, of which fallback).
std::pair<std::size_t, std::size_t> grant_samples(Population& population,
                                                  Vehicle& vehicle,
                                                  std::size_t count,
                                                  RandomSource& rng) {
  std::vector<SampleIndex> fresh;
  fresh.reserve(count);
  while (fresh.size() < count && !population.arrival_pool.empty()) {
    fresh.push_back(population.arrival_pool.back());
    population.arrival_pool.pop_back();
  }
  const std::size_t from_pool = fresh.size();

  // Pool exhausted: draw with replacement from the universe, skipping what the
  // vehicle already holds so the shard still grows by `count`.
  const std::size_t universe = population.universe.size();
  while (fresh.size() < count &&
         vehicle.shard.size() + fresh.size() < universe) {
    const SampleIndex candidate =
        population.universe[rng.uniform_index(universe)];
    if (std::binary_search(vehicle.shard.begin(), vehicle.shard.end(),
                           candidate) ||
        std::find(fresh.begin() + static_cast<std::ptrdiff_t>(from_pool),
                  fresh.end(), candidate) != fresh.end()) {
      continue;
    }
    fresh.push_back(candidate);
  }

  std::sort(fresh.begin(), fresh.end());
  std::vector<SampleIndex> merged;
  merged.reserve(vehicle.shard.size() + fresh.size());
  std::merge(vehicle.shard.begin(), vehicle.shard.end(), fresh.begin(),
             fresh.end(), std::back_inserter(merged));
  vehicle.shard = std::move(merged);
  return {fresh.size(), fresh.size() - from_pool};
}

}  // namespace

ArrivalLog step_mobility(Population& population, const MobilityParams& params,
                         int side, RandomSource& rng) {
  const Grid shape(side);
  const std::size_t n = population.vehicles.size();
  const std::size_t movers = fraction_count(params.move_fraction, n);
  ArrivalLog log;
  if (movers == 0) return log;
  if (shape.size() < 2) {
    throw ConfigError("step_mobility: vehicles cannot move on a 1x1 grid");
  }
  const std::size_t grant = params.arrival_shard_size > 0
                                ? params.arrival_shard_size
                                : population.initial_shard_size;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < movers; ++i) {
    std::swap(order[i], order[i + rng.uniform_index(n - i)]);
  }

  for (std::size_t i = 0; i < movers; ++i) {
    Vehicle& vehicle = population.vehicles[order[i]];
    const std::size_t current = shape.index(vehicle.cell);
    std::size_t target = rng.uniform_index(shape.size() - 1);
    if (target >= current) ++target;

    Arrival arrival;
    arrival.vehicle_id = vehicle.id;
    arrival.from = vehicle.cell;
    arrival.to = shape.coord(target);
    vehicle.cell = arrival.to;
    std::tie(arrival.samples, arrival.fallback_samples) =
        grant_samples(population, vehicle, grant, rng);

    log.total_samples += arrival.samples;
    log.fallback_samples += arrival.fallback_samples;
    log.arrivals.push_back(arrival);
  }
  return log;
}

double histogram_stddev(std::span<const std::int64_t> counts) {
  if (counts.empty()) return 0.0;
  const double n = static_cast<double>(counts.size());
  double mean = 0.0;
  for (std::int64_t c : counts) mean += static_cast<double>(c);
  mean /= n;
  double var = 0.0;
  for (std::int64_t c : counts) {
    const double d = static_cast<double>(c) - mean;
    var += d * d;
  }
  return std::sqrt(var / n);
}

std::vector<CellMeasurement> measure_cells(std::span<const Vehicle> vehicles,
                                           const ArrivalLog& arrivals,
                                           std::span<const int> labels,
                                           int n_classes, int side) {
  const Grid shape(side);
  const auto classes = static_cast<std::size_t>(n_classes);
  std::vector<std::int64_t> histograms(shape.size() * classes, 0);
  std::vector<CellMeasurement> out(shape.size());

  for (const Vehicle& v : vehicles) {
    const std::size_t cell = shape.index(v.cell);
    out[cell].sample_quantity += static_cast<std::int64_t>(v.shard.size());
    for (SampleIndex s : v.shard) {
      const int label = labels[s];
      if (label < 0 || label >= n_classes) {
        throw DataError("measure_cells: label out of range at sample " +
                        std::to_string(s));
      }
      ++histograms[cell * classes + static_cast<std::size_t>(label)];
    }
  }
  for (const Arrival& a : arrivals.arrivals) {
    out[shape.index(a.to)].inbound_samples +=
        static_cast<std::int64_t>(a.samples);
  }
  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    if (out[cell].sample_quantity == 0) continue;
    out[cell].distribution_quality = histogram_stddev(
        std::span<const std::int64_t>(histograms).subspan(cell * classes,
                                                          classes));
  }
  return out;
}

void apply_measurements(Grid& grid, std::span<const CellMeasurement> measured) {
  if (measured.size() != grid.size()) {
    throw ContractViolation("apply_measurements: size mismatch");
  }
  auto cells = grid.cells();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    cells[k].sample_quantity = measured[k].sample_quantity;
    cells[k].inbound_samples = measured[k].inbound_samples;
    cells[k].distribution_quality = measured[k].distribution_quality;
  }
}

}  // namespace cafl
