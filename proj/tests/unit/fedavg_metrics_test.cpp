#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "cafl/errors.hpp"
#include "cafl/fedavg.hpp"
#include "cafl/metrics.hpp"
#include "oracles.hpp"

namespace cafl {
namespace {

std::vector<WeightedUpdate> random_updates(RandomSource& rng, std::size_t count,
                                           std::size_t length) {
  std::vector<WeightedUpdate> out(count);
  for (WeightedUpdate& u : out) {
    u.params.values.resize(length);
    for (double& v : u.params.values) v = 10.0 * rng.normal();
    u.weight = static_cast<double>(1 + rng.uniform_index(500));
  }
  return out;
}

TEST(FedAvg, WorkedExample) {
  const std::vector<WeightedUpdate> u{{{{1.0, 1.0}}, 1.0}, {{{4.0, 4.0}}, 3.0}};
  const ModelParams m = fedavg(u);
  EXPECT_DOUBLE_EQ(m.values[0], 3.25);
  EXPECT_DOUBLE_EQ(m.values[1], 3.25);
}

TEST(FedAvg, IdenticalUpdatesAggregateExactly) {
  RandomSource rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    auto u = random_updates(rng, 1 + rng.uniform_index(10), 16);
    for (auto& x : u) x.params = u.front().params;
    EXPECT_EQ(fedavg(u), u.front().params);
  }
}

TEST(FedAvg, SingleUpdateIsReturned) {
  RandomSource rng(2);
  const auto u = random_updates(rng, 1, 9);
  EXPECT_EQ(fedavg(u), u.front().params);
}

TEST(FedAvg, PermutationAndScaleInvariant) {
  RandomSource rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto u = random_updates(rng, 2 + rng.uniform_index(8), 12);
    const ModelParams base = fedavg(u);
    std::reverse(u.begin(), u.end());
    const ModelParams reversed = fedavg(u);
    for (auto& x : u) x.weight *= 7.0;
    const ModelParams scaled = fedavg(u);
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(base.values[i], reversed.values[i], 1e-10);
      EXPECT_NEAR(base.values[i], scaled.values[i], 1e-10);
    }
  }
}

TEST(FedAvg, AgreesWithDirectWeightedSum) {
  RandomSource rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = random_updates(rng, 1 + rng.uniform_index(12), 20);
    std::vector<std::vector<double>> xs;
    std::vector<double> ws;
    for (const auto& x : u) {
      xs.push_back(x.params.values);
      ws.push_back(x.weight);
    }
    const auto expected = oracle::weighted_mean(xs, ws);
    const ModelParams got = fedavg(u);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_NEAR(got.values[i], expected[i], 1e-10);
    }
  }
}

TEST(FedAvg, RejectsBadInput) {
  EXPECT_THROW(fedavg({}), ContractViolation);
  const std::vector<WeightedUpdate> zero{{{{1.0}}, 0.0}};
  EXPECT_THROW(fedavg(zero), ContractViolation);
  const std::vector<WeightedUpdate> ragged{{{{1.0}}, 1.0}, {{{1.0, 2.0}}, 1.0}};
  EXPECT_THROW(fedavg(ragged), ContractViolation);
}

TEST(Metrics, BinaryWorkedExample) {
  const std::vector<int> truth{0, 0, 1, 1};
  const std::vector<int> pred{0, 0, 0, 0};
  const EvalMetrics m = compute_metrics(truth, pred, 2);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(m.per_class_f1[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.per_class_f1[1], 0.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, 1.0 / 3.0);
}

TEST(Metrics, PerfectPredictions) {
  const std::vector<int> y{0, 1, 2, 2, 1};
  const EvalMetrics m = compute_metrics(y, y, 3);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.macro_f1, 1.0);
}

TEST(Metrics, AbsentClassCountsAsZero) {
  const std::vector<int> y{0, 1};
  const EvalMetrics m = compute_metrics(y, y, 4);
  EXPECT_DOUBLE_EQ(m.macro_f1, 0.5);
}

TEST(Metrics, AgreesWithPrecisionRecallOracle) {
  RandomSource rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int classes = 1 + static_cast<int>(rng.uniform_index(6));
    const std::size_t n = 1 + rng.uniform_index(60);
    std::vector<int> truth(n), pred(n);
    for (std::size_t k = 0; k < n; ++k) {
      truth[k] = static_cast<int>(rng.uniform_index(classes));
      pred[k] = rng.uniform() < 0.5 ? truth[k]
                                    : static_cast<int>(rng.uniform_index(classes));
    }
    const EvalMetrics got = compute_metrics(truth, pred, classes);
    const oracle::Metrics want = oracle::metrics(truth, pred, classes);
    EXPECT_NEAR(got.accuracy, want.accuracy, 1e-12);
    EXPECT_NEAR(got.macro_f1, want.macro_f1, 1e-12);
    for (int c = 0; c < classes; ++c) {
      EXPECT_NEAR(got.per_class_f1[c], want.f1[c], 1e-12);
    }
  }
}

}  // namespace
}  // namespace cafl
