#include "cafl/metrics.hpp"

#include <cstdint>

#include "cafl/errors.hpp"

namespace cafl {

EvalMetrics compute_metrics(std::span<const int> truth,
                            std::span<const int> predicted, int n_classes) {
  if (truth.size() != predicted.size()) {
    throw ContractViolation("compute_metrics: length mismatch");
  }
  if (truth.empty()) throw ContractViolation("compute_metrics: no samples");
  const auto classes = static_cast<std::size_t>(n_classes);
  std::vector<std::int64_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
  std::int64_t correct = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const auto t = static_cast<std::size_t>(truth[k]);
    const auto p = static_cast<std::size_t>(predicted[k]);
    if (t == p) {
      ++tp[t];
      ++correct;
    } else {
      ++fp[p];
      ++fn[t];
    }
  }

  EvalMetrics out;
  out.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  out.per_class_f1.resize(classes);
  double sum = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const std::int64_t denom = 2 * tp[c] + fp[c] + fn[c];
    out.per_class_f1[c] =
        denom == 0 ? 0.0
                   : 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
    sum += out.per_class_f1[c];
  }
  out.macro_f1 = sum / static_cast<double>(classes);
  return out;
}

EvalMetrics evaluate(const Model& model, const ModelParams& params,
                     const Dataset& test) {
  if (test.size() == 0) throw ContractViolation("evaluate: empty test set");
  const std::vector<int> predicted = model.predict(params.values, test.features);
  return compute_metrics(test.labels, predicted, test.n_classes);
}

}  // namespace cafl
