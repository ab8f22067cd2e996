#include "cafl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cafl/errors.hpp"

namespace cafl {

namespace {

using RowMatrix = FeatureMatrix;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::RowVectorXd>;
using VectorMap = Eigen::Map<Eigen::RowVectorXd>;

// Turns logits into dL/dlogits (softmax minus one-hot, averaged over rows)
// and returns the mean cross-entropy.
double softmax_cross_entropy(RowMatrix& z, std::span<const int> labels) {
  const Eigen::Index rows = z.rows();
  double loss = 0.0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    auto row = z.row(r);
    const double peak = row.maxCoeff();
    row.array() = (row.array() - peak).exp();
    const double total = row.sum();
    const int y = labels[static_cast<std::size_t>(r)];
    loss += std::log(total) - std::log(row(y));
    row /= total;
    row(y) -= 1.0;
  }
  z /= static_cast<double>(rows);
  return loss / static_cast<double>(rows);
}

double mean_cross_entropy(RowMatrix z, std::span<const int> labels) {
  double loss = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const auto row = z.row(r);
    const double peak = row.maxCoeff();
    const double lse = peak + std::log((row.array() - peak).exp().sum());
    loss += lse - row(labels[static_cast<std::size_t>(r)]);
  }
  return loss / static_cast<double>(z.rows());
}

void fill_uniform(std::span<double> values, double scale, RandomSource& rng) {
  for (double& v : values) v = (2.0 * rng.uniform() - 1.0) * scale;
}

}  // namespace

std::string_view to_string(TrainerKind kind) noexcept {
  switch (kind) {
    case TrainerKind::kLogisticRegression:
      return "logistic_regression";
    case TrainerKind::kMlp:
      return "mlp_1hidden";
  }
  return "unknown";
}

TrainerKind parse_trainer(std::string_view name) {
  if (name == "logistic_regression") return TrainerKind::kLogisticRegression;
  if (name == "mlp_1hidden") return TrainerKind::kMlp;
  throw ConfigError("unknown trainer '" + std::string(name) +
                    "' (expected logistic_regression or mlp_1hidden)");
}

void TrainerSpec::validate() const {
  if (!(adam.learning_rate >= 0.0) || !std::isfinite(adam.learning_rate)) {
    throw ConfigError("trainer: learning_rate must be finite and >= 0");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.epsilon > 0.0)) {
    throw ConfigError("trainer: Adam betas must lie in [0, 1), epsilon > 0");
  }
  if (local_epochs < 1) throw ConfigError("trainer: local_epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("trainer: batch_size must be >= 1");
  if (kind == TrainerKind::kMlp && hidden_units < 1) {
    throw ConfigError("trainer: hidden_units must be >= 1");
  }
}

double Model::loss(std::span<const double> params, const FeatureMatrix& x,
                   std::span<const int> labels) const {
  return mean_cross_entropy(logits(params, x), labels);
}

std::vector<int> Model::predict(std::span<const double> params,
                                const FeatureMatrix& x) const {
  const FeatureMatrix z = logits(params, x);
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    Eigen::Index best = 0;
    z.row(r).maxCoeff(&best);  // first maximum on ties
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

void Model::check_params(std::span<const double> params) const {
  if (params.size() != parameter_count()) {
    throw ContractViolation("model expects " +
                            std::to_string(parameter_count()) +
                            " parameters, got " + std::to_string(params.size()));
  }
}

LogisticRegression::LogisticRegression(std::size_t n_features, int n_classes)
    : Model(n_features, n_classes) {}

std::size_t LogisticRegression::parameter_count() const noexcept {
  const auto c = static_cast<std::size_t>(n_classes());
  return c * n_features() + c;
}

ModelParams LogisticRegression::initialize(RandomSource& rng) const {
  ModelParams p;
  p.values.resize(parameter_count());
  fill_uniform(p.values, 1.0 / std::sqrt(static_cast<double>(n_features())), rng);
  return p;
}

FeatureMatrix LogisticRegression::logits(std::span<const double> params,
                                         const FeatureMatrix& x) const {
  check_params(params);
  const auto c = static_cast<Eigen::Index>(n_classes());
  const auto f = static_cast<Eigen::Index>(n_features());
  const ConstMatrixMap w(params.data(), c, f);
  const ConstVectorMap b(params.data() + c * f, c);
  FeatureMatrix z = x * w.transpose();
  z.rowwise() += b;
  return z;
}

double LogisticRegression::loss_and_gradient(std::span<const double> params,
                                             const FeatureMatrix& x,
                                             std::span<const int> labels,
                                             std::span<double> grad) const {
  FeatureMatrix g = logits(params, x);
  const double loss = softmax_cross_entropy(g, labels);
  const auto c = static_cast<Eigen::Index>(n_classes());
  const auto f = static_cast<Eigen::Index>(n_features());
  MatrixMap dw(grad.data(), c, f);
  VectorMap db(grad.data() + c * f, c);
  dw.noalias() = g.transpose() * x;
  db = g.colwise().sum();
  return loss;
}

Mlp::Mlp(std::size_t n_features, int hidden_units, int n_classes)
    : Model(n_features, n_classes), hidden_(hidden_units) {}

std::size_t Mlp::parameter_count() const noexcept {
  const auto h = static_cast<std::size_t>(hidden_);
  const auto c = static_cast<std::size_t>(n_classes());
  return h * n_features() + h + c * h + c;
}

ModelParams Mlp::initialize(RandomSource& rng) const {
  ModelParams p;
  p.values.resize(parameter_count());
  const std::size_t first = static_cast<std::size_t>(hidden_) * n_features() +
                            static_cast<std::size_t>(hidden_);
  std::span<double> all(p.values);
  fill_uniform(all.first(first),
               1.0 / std::sqrt(static_cast<double>(n_features())), rng);
  fill_uniform(all.subspan(first), 1.0 / std::sqrt(static_cast<double>(hidden_)),
               rng);
  return p;
}

namespace {

struct MlpLayout {
  Eigen::Index f, h, c;
  const double* w1;
  const double* b1;
  const double* w2;
  const double* b2;
};

MlpLayout layout(const double* base, Eigen::Index f, Eigen::Index h,
                 Eigen::Index c) {
  MlpLayout l{f, h, c, base, nullptr, nullptr, nullptr};
  l.b1 = l.w1 + h * f;
  l.w2 = l.b1 + h;
  l.b2 = l.w2 + c * h;
  return l;
}

}  // namespace

FeatureMatrix Mlp::logits(std::span<const double> params,
                          const FeatureMatrix& x) const {
  check_params(params);
  const MlpLayout l = layout(params.data(), static_cast<Eigen::Index>(n_features()),
                             hidden_, n_classes());
  FeatureMatrix hidden = x * ConstMatrixMap(l.w1, l.h, l.f).transpose();
  hidden.rowwise() += ConstVectorMap(l.b1, l.h);
  hidden = hidden.cwiseMax(0.0);
  FeatureMatrix z = hidden * ConstMatrixMap(l.w2, l.c, l.h).transpose();
  z.rowwise() += ConstVectorMap(l.b2, l.c);
  return z;
}

double Mlp::loss_and_gradient(std::span<const double> params,
                              const FeatureMatrix& x,
                              std::span<const int> labels,
                              std::span<double> grad) const {
  check_params(params);
  const MlpLayout l = layout(params.data(), static_cast<Eigen::Index>(n_features()),
                             hidden_, n_classes());
  const ConstMatrixMap w2(l.w2, l.c, l.h);

  FeatureMatrix pre = x * ConstMatrixMap(l.w1, l.h, l.f).transpose();
  pre.rowwise() += ConstVectorMap(l.b1, l.h);
  const FeatureMatrix act = pre.cwiseMax(0.0);
  FeatureMatrix g = act * w2.transpose();
  g.rowwise() += ConstVectorMap(l.b2, l.c);
  const double loss = softmax_cross_entropy(g, labels);

  double* out = grad.data();
  MatrixMap dw1(out, l.h, l.f);
  VectorMap db1(out + l.h * l.f, l.h);
  MatrixMap dw2(out + l.h * l.f + l.h, l.c, l.h);
  VectorMap db2(out + l.h * l.f + l.h + l.c * l.h, l.c);

  dw2.noalias() = g.transpose() * act;
  db2 = g.colwise().sum();
  FeatureMatrix back = g * w2;
  back = (pre.array() > 0.0).select(back, 0.0);
  dw1.noalias() = back.transpose() * x;
  db1 = back.colwise().sum();
  return loss;
}

std::unique_ptr<Model> make_model(const TrainerSpec& spec,
                                  std::size_t n_features, int n_classes) {
  switch (spec.kind) {
    case TrainerKind::kLogisticRegression:
      return std::make_unique<LogisticRegression>(n_features, n_classes);
    case TrainerKind::kMlp:
      return std::make_unique<Mlp>(n_features, spec.hidden_units, n_classes);
  }
  throw ConfigError("unknown trainer kind");
}

FeatureMatrix gather_rows(const Dataset& data,
                          std::span<const std::uint32_t> rows) {
  FeatureMatrix out(static_cast<Eigen::Index>(rows.size()),
                    data.features.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) =
        data.features.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

ModelParams train_local(const Model& model, const ModelParams& start,
                        const Dataset& data,
                        std::span<const std::uint32_t> rows,
                        const TrainerSpec& spec, RandomSource& rng) {
  if (rows.empty()) throw ContractViolation("train_local: empty shard");
  if (start.size() != model.parameter_count()) {
    throw ContractViolation("train_local: parameter length mismatch");
  }
  const AdamSettings& adam = spec.adam;
  ModelParams params = start;
  Eigen::Map<Eigen::VectorXd> theta(params.values.data(),
                                    static_cast<Eigen::Index>(params.size()));
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
  double beta1_power = 1.0;
  double beta2_power = 1.0;

  std::vector<std::uint32_t> order(rows.begin(), rows.end());
  std::vector<int> batch_labels;
  const auto batch = static_cast<std::size_t>(spec.batch_size);
  for (int epoch = 0; epoch < spec.local_epochs; ++epoch) {
    rng.shuffle(std::span<std::uint32_t>(order));
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::span<const std::uint32_t> idx =
          std::span<const std::uint32_t>(order).subspan(
              begin, std::min(batch, order.size() - begin));
      const FeatureMatrix x = gather_rows(data, idx);
      batch_labels.clear();
      for (std::uint32_t r : idx) batch_labels.push_back(data.labels[r]);

      model.loss_and_gradient(params.values, x, batch_labels,
                              std::span<double>(grad.data(),
                                                static_cast<std::size_t>(grad.size())));
      beta1_power *= adam.beta1;
      beta2_power *= adam.beta2;
      m = adam.beta1 * m + (1.0 - adam.beta1) * grad;
      v = adam.beta2 * v + (1.0 - adam.beta2) * grad.cwiseAbs2();
      const double step = adam.learning_rate / (1.0 - beta1_power);
      const double v_scale = 1.0 / (1.0 - beta2_power);
      theta.array() -=
          step * m.array() / ((v.array() * v_scale).sqrt() + adam.epsilon);
    }
  }
  return params;
}

}  // namespace cafl
