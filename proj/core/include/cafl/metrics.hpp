#pragma once

#include <span>
#include <vector>

#include "cafl/dataset.hpp"
#include "cafl/model.hpp"

namespace cafl {

struct EvalMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;
};

/// Accuracy and per-class F1 from a confusion matrix; precision, recall and F1
/// take 0/0 as 0. macro_f1 is the unweighted mean over all `n_classes`.
EvalMetrics compute_metrics(std::span<const int> truth,
                            std::span<const int> predicted, int n_classes);

// Arg-max predictions of the model on `test`, scored with compute_metrics.
EvalMetrics evaluate(const Model& model, const ModelParams& params,
                     const Dataset& test);

}  // namespace cafl
