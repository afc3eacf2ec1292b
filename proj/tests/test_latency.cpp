#include "streamal/latency.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <utility>

namespace streamal {
namespace {

TEST(LatencyDistribution, UniformShiftZeroDeltaIsConstant50) {
  const LatencyDistribution dist{LatencyDistribution::Kind::kUniformShift, 0.0};
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(dist.sample(rng), 50);
}

TEST(LatencyDistribution, UniformShiftStaysInRange) {
  const LatencyDistribution dist{LatencyDistribution::Kind::kUniformShift, 100.0};
  Rng rng(2);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const TimeStep d = dist.sample(rng);
    ASSERT_GE(d, 50);
    ASSERT_LE(d, 150);
    sum += static_cast<double>(d);
  }
  EXPECT_NEAR(sum / 100000.0, 100.0, 1.0);
}

TEST(LatencyDistribution, TruncatedNormalZeroDeltaHalfImmediate) {
  const LatencyDistribution dist{LatencyDistribution::Kind::kTruncatedNormal, 0.0};
  Rng rng(3);
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) {
    const TimeStep d = dist.sample(rng);
    ASSERT_GE(d, 0);
    zeros += d == 0;
  }
  // mass at or below zero truncates to 0: about half the draws
  EXPECT_NEAR(static_cast<double>(zeros) / 100000.0, 0.5, 0.02);
}

TEST(LatencyDistribution, TruncatedNormalLargeDeltaMean) {
  const LatencyDistribution dist{LatencyDistribution::Kind::kTruncatedNormal, 300.0};
  Rng rng(4);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += static_cast<double>(dist.sample(rng));
  EXPECT_NEAR(sum / 100000.0, 300.0, 1.0);
}

TEST(LatencyDistribution, DeterministicUnderFixedSeed) {
  const LatencyDistribution dist{LatencyDistribution::Kind::kTruncatedNormal, 100.0};
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(dist.sample(a), dist.sample(b));
}

TEST(LabelOracle, DueTimeIsQueryPlusDelay) {
  LabelOracle oracle;
  Rng rng(1);
  const LatencyDistribution dist{LatencyDistribution::Kind::kUniformShift, 0.0};
  EXPECT_EQ(oracle.enqueue(100, 1, dist, rng), 150);
}

TEST(LabelOracle, DuplicateQueryRejected) {
  LabelOracle oracle;
  Rng rng(1);
  const LatencyDistribution dist{LatencyDistribution::Kind::kUniformShift, 0.0};
  oracle.enqueue(7, 0, dist, rng);
  EXPECT_THROW(oracle.enqueue(7, 0, dist, rng), std::invalid_argument);
}

TEST(LabelOracle, NothingDueReturnsEmpty) {
  LabelOracle oracle;
  Rng rng(1);
  const LatencyDistribution dist{LatencyDistribution::Kind::kUniformShift, 0.0};
  oracle.enqueue(1, 0, dist, rng);  // due 51
  EXPECT_TRUE(oracle.deliver_due(50).empty());
  EXPECT_EQ(oracle.pending_count(), 1u);
}

TEST(LabelOracle, BoundaryDueDelivered) {
  LabelOracle oracle;
  Rng rng(1);
  const LatencyDistribution dist{LatencyDistribution::Kind::kUniformShift, 0.0};
  oracle.enqueue(1, 3, dist, rng);  // due 51
  const auto out = oracle.deliver_due(51);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].t_query, 1);
  EXPECT_EQ(out[0].due, 51);
  EXPECT_EQ(out[0].label, 3);
  EXPECT_EQ(oracle.pending_count(), 0u);
}

TEST(LabelOracle, DrainOrderIsDueThenQueryTime) {
  LabelOracle oracle;
  Rng rng(1);
  // uniform(delta = 0) pins every delay to 50, so due = t_query + 50
  oracle.enqueue(3, 2, {LatencyDistribution::Kind::kUniformShift, 0.0}, rng);  // due 53
  oracle.enqueue(1, 0, {LatencyDistribution::Kind::kUniformShift, 0.0}, rng);  // due 51
  oracle.enqueue(2, 1, {LatencyDistribution::Kind::kUniformShift, 0.0}, rng);  // due 52
  const auto out = oracle.deliver_due(53);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].t_query, 1);
  EXPECT_EQ(out[1].t_query, 2);
  EXPECT_EQ(out[2].t_query, 3);
  EXPECT_TRUE(std::is_sorted(out.begin(), out.end(), [](const Delivery& a, const Delivery& b) {
    return std::make_pair(a.due, a.t_query) < std::make_pair(b.due, b.t_query);
  }));
}

TEST(LabelOracle, EveryQueryDeliveredExactlyOnce) {
  LabelOracle oracle;
  Rng rng(5);
  const LatencyDistribution dist{LatencyDistribution::Kind::kTruncatedNormal, 40.0};
  std::vector<TimeStep> delivered;
  for (TimeStep t = 1; t <= 500; ++t) {
    oracle.enqueue(t, 0, dist, rng);
    for (const auto& d : oracle.deliver_due(t)) {
      EXPECT_LE(d.due, t);
      delivered.push_back(d.t_query);
    }
  }
  for (const auto& d : oracle.deliver_due(100000)) delivered.push_back(d.t_query);
  std::sort(delivered.begin(), delivered.end());
  ASSERT_EQ(delivered.size(), 500u);
  for (TimeStep t = 1; t <= 500; ++t) EXPECT_EQ(delivered[static_cast<std::size_t>(t - 1)], t);
}

}  // namespace
}  // namespace streamal
