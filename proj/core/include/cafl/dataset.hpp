#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "cafl/rng.hpp"

namespace cafl {

using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Labelled samples with features in [0, 1].
struct Dataset {
  FeatureMatrix features;
  std::vector<int> labels;
  int n_classes = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t n_features() const noexcept {
    return static_cast<std::size_t>(features.cols());
  }

  // Throws DataError when rows and labels disagree or a label is out of range.
  void validate() const;

  // Rows `rows`, in the given order.
  Dataset subset(std::span<const std::uint32_t> rows) const;
};

/// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
/// Pixels are scaled by 1/255. Throws IngestionError for unreadable files, a
/// wrong magic number, truncated payloads, mismatched counts, or labels >=
/// `n_classes`.
Dataset load_idx(const std::filesystem::path& images,
                 const std::filesystem::path& labels, int n_classes = 10);

// Concatenates several image/label pairs (e.g. MNIST train + t10k).
Dataset load_idx_files(
    std::span<const std::pair<std::filesystem::path, std::filesystem::path>>
        files,
    int n_classes = 10);

// Writes an IDX pair; features are quantised to round(255 * x).
void save_idx(const Dataset& data, int rows, int cols,
              const std::filesystem::path& images,
              const std::filesystem::path& labels);

/// Gaussian class blobs: class means uniform in [-mean_spread/2,
/// mean_spread/2] per feature, unit variance, labels balanced (i mod
/// n_classes), then per-feature min-max scaled to [0, 1].
Dataset synth_dataset(std::size_t n_samples, std::size_t n_features,
                      int n_classes, RandomSource& rng,
                      double mean_spread = 4.0);

/// Stratified random split. Each class contributes round-half-up(test_frac *
/// count) test samples, clamped to leave at least one on each side. Both
/// outputs keep the original row order. Throws DataError if any present class
/// has fewer than two samples, ConfigError unless 0 < test_frac < 1.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             double test_frac,
                                             RandomSource& rng);

}  // namespace cafl
