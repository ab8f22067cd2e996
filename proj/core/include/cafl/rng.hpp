#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace cafl {

// Independent purposes that get their own sub-stream of an experiment seed.
// Values are part of the reproducibility contract: renumbering them changes
// every recorded trajectory.
enum class Stream : std::uint64_t {
  kPopulation = 1,
  kMobility = 2,
  kCapacity = 3,
  kSelection = 4,
  kModelInit = 5,
  kTraining = 6,
  kSplit = 7,
  kSynthetic = 8,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for a sub-stream identified by (seed, stream, a, b).
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                          std::uint64_t b = 0) noexcept;

/// Seeded random source. Backed by std::mt19937_64, whose output sequence is
/// fixed by the standard; the distributions below are implemented here rather
/// than taken from <random> so draws are identical across standard libraries.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  RandomSource(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
               std::uint64_t b = 0)
      : engine_(derive_seed(seed, stream, a, b)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  // Uniform integer on [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Standard normal (Box-Muller, one value per call).
  double normal();

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      using std::swap;
      swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cafl
