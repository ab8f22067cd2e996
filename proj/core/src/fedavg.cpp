#include "cafl/fedavg.hpp"

#include <cmath>
#include <string>

#include "cafl/errors.hpp"

namespace cafl {

ModelParams fedavg(std::span<const WeightedUpdate> updates) {
  if (updates.empty()) throw ContractViolation("fedavg: no updates");
  const std::size_t length = updates.front().params.size();
  for (std::size_t k = 0; k < updates.size(); ++k) {
    if (updates[k].params.size() != length) {
      throw ContractViolation("fedavg: update " + std::to_string(k) + " has " +
                              std::to_string(updates[k].params.size()) +
                              " values, expected " + std::to_string(length));
    }
    if (!(updates[k].weight > 0.0) || !std::isfinite(updates[k].weight)) {
      throw ContractViolation("fedavg: update " + std::to_string(k) +
                              " has non-positive weight");
    }
  }

  // mean_k = mean_{k-1} + (w_k / W_k) * (x_k - mean_{k-1})
  ModelParams mean;
  mean.values.assign(length, 0.0);
  double cumulative = 0.0;
  for (const WeightedUpdate& u : updates) {
    cumulative += u.weight;
    const double share = u.weight / cumulative;
    for (std::size_t i = 0; i < length; ++i) {
      mean.values[i] += share * (u.params.values[i] - mean.values[i]);
    }
  }
  return mean;
}

}  // namespace cafl
