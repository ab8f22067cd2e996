#include "cafl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "cafl/ca_selector.hpp"
#include "cafl/errors.hpp"

namespace cafl {

void Dataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("dataset: " + std::to_string(features.rows()) +
                    " feature rows but " + std::to_string(labels.size()) +
                    " labels");
  }
  if (n_classes < 1) throw DataError("dataset: n_classes must be positive");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) {
      throw DataError("dataset: label " + std::to_string(labels[i]) +
                      " at row " + std::to_string(i) + " outside [0, " +
                      std::to_string(n_classes) + ")");
    }
  }
}

Dataset Dataset::subset(std::span<const std::uint32_t> rows) const {
  Dataset out;
  out.n_classes = n_classes;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.features.row(static_cast<Eigen::Index>(k)) =
        features.row(static_cast<Eigen::Index>(rows[k]));
    out.labels.push_back(labels[rows[k]]);
  }
  return out;
}

namespace {

using Bytes = std::vector<unsigned char>;

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IngestionError(IngestionError::Kind::kIo,
                         "cannot open " + path.string());
  }
  return Bytes(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
}

std::uint32_t read_be32(const Bytes& bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) |
         std::uint32_t{bytes[offset + 3]};
}

struct IdxPayload {
  std::vector<std::uint32_t> dims;
  std::size_t data_offset = 0;
};

// Validates magic (unsigned byte data, `ndims` dimensions) and length.
IdxPayload parse_header(const Bytes& bytes, std::uint32_t expected_magic,
                        const std::filesystem::path& path) {
  if (bytes.size() < 4) {
    throw IngestionError(IngestionError::Kind::kTruncated,
                         path.string() + ": expected at least 4 header bytes, got " +
                             std::to_string(bytes.size()));
  }
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != expected_magic) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bad magic 0x%08x (expected 0x%08x)", magic,
                  expected_magic);
    throw IngestionError(IngestionError::Kind::kBadMagic,
                         path.string() + ": " + buf);
  }
  IdxPayload payload;
  const std::size_t ndims = magic & 0xffu;
  payload.data_offset = 4 + 4 * ndims;
  if (bytes.size() < payload.data_offset) {
    throw IngestionError(IngestionError::Kind::kTruncated,
                         path.string() + ": expected " +
                             std::to_string(payload.data_offset) +
                             " header bytes, got " + std::to_string(bytes.size()));
  }
  std::size_t expected = payload.data_offset;
  std::size_t elements = 1;
  for (std::size_t d = 0; d < ndims; ++d) {
    payload.dims.push_back(read_be32(bytes, 4 + 4 * d));
    elements *= payload.dims.back();
  }
  expected += elements;
  if (bytes.size() < expected) {
    throw IngestionError(IngestionError::Kind::kTruncated,
                         path.string() + ": expected " + std::to_string(expected) +
                             " bytes, got " + std::to_string(bytes.size()));
  }
  return payload;
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images,
                 const std::filesystem::path& labels, int n_classes) {
  const Bytes image_bytes = read_file(images);
  const Bytes label_bytes = read_file(labels);
  const IdxPayload img = parse_header(image_bytes, 0x00000803u, images);
  const IdxPayload lbl = parse_header(label_bytes, 0x00000801u, labels);

  const std::size_t n = img.dims[0];
  if (lbl.dims[0] != n) {
    throw IngestionError(IngestionError::Kind::kCountMismatch,
                         images.string() + " holds " + std::to_string(n) +
                             " images but " + labels.string() + " holds " +
                             std::to_string(lbl.dims[0]) + " labels");
  }
  const std::size_t pixels = std::size_t{img.dims[1]} * img.dims[2];

  Dataset out;
  out.n_classes = n_classes;
  out.features.resize(static_cast<Eigen::Index>(n),
                      static_cast<Eigen::Index>(pixels));
  const unsigned char* src = image_bytes.data() + img.data_offset;
  double* dst = out.features.data();
  for (std::size_t k = 0; k < n * pixels; ++k) {
    dst[k] = static_cast<double>(src[k]) / 255.0;
  }
  out.labels.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int label = label_bytes[lbl.data_offset + k];
    if (label >= n_classes) {
      throw IngestionError(IngestionError::Kind::kBadLabel,
                           labels.string() + ": label " + std::to_string(label) +
                               " at index " + std::to_string(k) +
                               " exceeds n_classes " + std::to_string(n_classes));
    }
    out.labels[k] = label;
  }
  return out;
}

Dataset load_idx_files(
    std::span<const std::pair<std::filesystem::path, std::filesystem::path>>
        files,
    int n_classes) {
  if (files.empty()) throw ConfigError("load_idx_files: no files given");
  std::vector<Dataset> parts;
  Eigen::Index rows = 0;
  for (const auto& [images, labels] : files) {
    parts.push_back(load_idx(images, labels, n_classes));
    rows += parts.back().features.rows();
    if (parts.back().features.cols() != parts.front().features.cols()) {
      throw IngestionError(IngestionError::Kind::kCountMismatch,
                           images.string() + ": image size differs from " +
                               files.front().first.string());
    }
  }
  if (parts.size() == 1) return std::move(parts.front());

  Dataset out;
  out.n_classes = n_classes;
  out.features.resize(rows, parts.front().features.cols());
  Eigen::Index at = 0;
  for (Dataset& part : parts) {
    out.features.middleRows(at, part.features.rows()) = part.features;
    at += part.features.rows();
    out.labels.insert(out.labels.end(), part.labels.begin(), part.labels.end());
  }
  return out;
}

void save_idx(const Dataset& data, int rows, int cols,
              const std::filesystem::path& images,
              const std::filesystem::path& labels) {
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) !=
      data.n_features()) {
    throw ContractViolation("save_idx: rows * cols must equal n_features");
  }
  const auto put_be32 = [](std::ofstream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                       static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(b, 4);
  };
  std::ofstream img(images, std::ios::binary);
  std::ofstream lbl(labels, std::ios::binary);
  if (!img || !lbl) {
    throw OutputError("save_idx: cannot write " + images.string() + " / " +
                      labels.string());
  }
  const auto n = static_cast<std::uint32_t>(data.size());
  put_be32(img, 0x00000803u);
  put_be32(img, n);
  put_be32(img, static_cast<std::uint32_t>(rows));
  put_be32(img, static_cast<std::uint32_t>(cols));
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.features.cols(); ++c) {
      const double v = std::clamp(data.features(r, c), 0.0, 1.0);
      img.put(static_cast<char>(std::lround(v * 255.0)));
    }
  }
  put_be32(lbl, 0x00000801u);
  put_be32(lbl, n);
  for (int label : data.labels) lbl.put(static_cast<char>(label));
}

Dataset synth_dataset(std::size_t n_samples, std::size_t n_features,
                      int n_classes, RandomSource& rng, double mean_spread) {
  if (n_classes < 1 || n_features < 1) {
    throw ConfigError("synth_dataset: need n_classes >= 1 and n_features >= 1");
  }
  if (n_samples < static_cast<std::size_t>(n_classes)) {
    throw ConfigError("synth_dataset: n_samples must be >= n_classes");
  }
  const auto classes = static_cast<Eigen::Index>(n_classes);
  const auto features = static_cast<Eigen::Index>(n_features);
  FeatureMatrix means(classes, features);
  for (Eigen::Index c = 0; c < classes; ++c) {
    for (Eigen::Index f = 0; f < features; ++f) {
      means(c, f) = (rng.uniform() - 0.5) * mean_spread;
    }
  }

  Dataset out;
  out.n_classes = n_classes;
  out.features.resize(static_cast<Eigen::Index>(n_samples), features);
  out.labels.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(n_classes));
    out.labels[i] = label;
    for (Eigen::Index f = 0; f < features; ++f) {
      out.features(static_cast<Eigen::Index>(i), f) =
          means(label, f) + rng.normal();
    }
  }
  for (Eigen::Index f = 0; f < features; ++f) {
    auto column = out.features.col(f);
    const double lo = column.minCoeff();
    const double hi = column.maxCoeff();
    if (hi > lo) {
      column = ((column.array() - lo) / (hi - lo)).cwiseMax(0.0).cwiseMin(1.0);
    } else {
      column.setZero();
    }
  }
  return out;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             double test_frac,
                                             RandomSource& rng) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) {
    throw ConfigError("split_train_test: test_frac must lie in (0, 1)");
  }
  data.validate();
  std::vector<std::vector<std::uint32_t>> by_class(
      static_cast<std::size_t>(data.n_classes));
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_class[static_cast<std::size_t>(data.labels[i])].push_back(
        static_cast<std::uint32_t>(i));
  }

  std::vector<std::uint32_t> train_rows;
  std::vector<std::uint32_t> test_rows;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      throw DataError("split_train_test: class " + std::to_string(c) +
                      " has " + std::to_string(rows.size()) +
                      " sample; stratification needs at least 2");
    }
    rng.shuffle(std::span<std::uint32_t>(rows));
    const std::size_t n_test =
        std::clamp<std::size_t>(fraction_count(test_frac, rows.size()), 1,
                                rows.size() - 1);
    test_rows.insert(test_rows.end(), rows.begin(),
                     rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_rows.insert(train_rows.end(),
                      rows.begin() + static_cast<std::ptrdiff_t>(n_test),
                      rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {data.subset(train_rows), data.subset(test_rows)};
}

}  // namespace cafl
