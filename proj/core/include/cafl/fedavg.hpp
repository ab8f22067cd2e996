#pragma once

#include <span>

#include "cafl/model.hpp"

namespace cafl {

struct WeightedUpdate {
  ModelParams params;
  double weight = 0.0;  // client sample count
};

/// Element-wise mean of the updates weighted by sample count. Computed as a
/// running mean so identical updates aggregate to themselves exactly. Throws
/// ContractViolation on an empty list, non-positive weights, or mismatched
/// lengths.
ModelParams fedavg(std::span<const WeightedUpdate> updates);

}  // namespace cafl
