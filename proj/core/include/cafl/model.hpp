#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "cafl/dataset.hpp"
#include "cafl/rng.hpp"

namespace cafl {

// Flat parameter vector exchanged between clients and the server.
struct ModelParams {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const ModelParams&) const = default;
};

enum class TrainerKind { kLogisticRegression, kMlp };

std::string_view to_string(TrainerKind kind) noexcept;
// Accepts "logistic_regression" and "mlp_1hidden".
TrainerKind parse_trainer(std::string_view name);

struct AdamSettings {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainerSpec {
  TrainerKind kind = TrainerKind::kLogisticRegression;
  int hidden_units = 128;
  AdamSettings adam;
  int local_epochs = 5;
  int batch_size = 32;

  void validate() const;
};

/// A softmax classifier whose parameters live in a flat vector. Losses are
/// mean cross-entropy over the rows given.
class Model {
 public:
  Model(std::size_t n_features, int n_classes)
      : n_features_(n_features), n_classes_(n_classes) {}
  virtual ~Model() = default;

  std::size_t n_features() const noexcept { return n_features_; }
  int n_classes() const noexcept { return n_classes_; }

  virtual std::size_t parameter_count() const noexcept = 0;

  // Uniform in [-s, s], s = 1/sqrt(fan_in) of each layer.
  virtual ModelParams initialize(RandomSource& rng) const = 0;

  // rows(x) x n_classes logits.
  virtual FeatureMatrix logits(std::span<const double> params,
                               const FeatureMatrix& x) const = 0;

  // Returns the loss and overwrites `grad` with its gradient.
  virtual double loss_and_gradient(std::span<const double> params,
                                   const FeatureMatrix& x,
                                   std::span<const int> labels,
                                   std::span<double> grad) const = 0;

  double loss(std::span<const double> params, const FeatureMatrix& x,
              std::span<const int> labels) const;

  // Arg-max class per row; ties resolve to the lowest class index.
  std::vector<int> predict(std::span<const double> params,
                           const FeatureMatrix& x) const;

 protected:
  void check_params(std::span<const double> params) const;

 private:
  std::size_t n_features_;
  int n_classes_;
};

// Multinomial logistic regression: W (classes x features) then b (classes).
class LogisticRegression final : public Model {
 public:
  LogisticRegression(std::size_t n_features, int n_classes);

  std::size_t parameter_count() const noexcept override;
  ModelParams initialize(RandomSource& rng) const override;
  FeatureMatrix logits(std::span<const double> params,
                       const FeatureMatrix& x) const override;
  double loss_and_gradient(std::span<const double> params,
                           const FeatureMatrix& x, std::span<const int> labels,
                           std::span<double> grad) const override;
};

// One ReLU hidden layer: W1 (hidden x features), b1, W2 (classes x hidden), b2.
class Mlp final : public Model {
 public:
  Mlp(std::size_t n_features, int hidden_units, int n_classes);

  int hidden_units() const noexcept { return hidden_; }

  std::size_t parameter_count() const noexcept override;
  ModelParams initialize(RandomSource& rng) const override;
  FeatureMatrix logits(std::span<const double> params,
                       const FeatureMatrix& x) const override;
  double loss_and_gradient(std::span<const double> params,
                           const FeatureMatrix& x, std::span<const int> labels,
                           std::span<double> grad) const override;

 private:
  int hidden_;
};

std::unique_ptr<Model> make_model(const TrainerSpec& spec,
                                  std::size_t n_features, int n_classes);

// Rows of `data` gathered into a contiguous matrix.
FeatureMatrix gather_rows(const Dataset& data,
                          std::span<const std::uint32_t> rows);

/// `local_epochs` passes of mini-batch Adam over `rows` of `data`, starting
/// from `start`. Adam moments start at zero on every call. Batch order is
/// reshuffled per epoch from `rng`. Throws ContractViolation for an empty
/// shard or a parameter vector of the wrong length.
ModelParams train_local(const Model& model, const ModelParams& start,
                        const Dataset& data,
                        std::span<const std::uint32_t> rows,
                        const TrainerSpec& spec, RandomSource& rng);

}  // namespace cafl
