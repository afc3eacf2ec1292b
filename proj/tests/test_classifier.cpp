#include "streamal/classifier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "streamal/rng.hpp"

namespace streamal {
namespace {

TEST(Pwc, SingleTrainingPointDominates) {
  PwcModel m(2, 1.0);
  m.add({0.0, 0.0}, 0);
  const auto post = m.posterior(std::vector<double>{5.0, -3.0});
  EXPECT_DOUBLE_EQ(post[0], 1.0);
  EXPECT_DOUBLE_EQ(post[1], 0.0);
}

TEST(Pwc, EquidistantOppositeClasses) {
  PwcModel m(2, 1.0);
  m.add({-1.0, 0.0}, 0);
  m.add({1.0, 0.0}, 1);
  const auto post = m.posterior(std::vector<double>{0.0, 0.0});
  EXPECT_NEAR(post[0], 0.5, 1e-12);
  EXPECT_NEAR(post[1], 0.5, 1e-12);
}

// Kernel values 1, e^-2, e^-2 with classes (A, B, B):
// p(A) = 1 / (1 + 2 e^-2) ~ 0.787
TEST(Pwc, ThreePointHandEvaluatedPosterior) {
  PwcModel m(2, 1.0);
  m.add({0.0, 0.0}, 0);
  m.add({2.0, 0.0}, 1);
  m.add({0.0, 2.0}, 1);
  const std::vector<double> x{0.0, 0.0};
  const double expected = 1.0 / (1.0 + 2.0 * std::exp(-2.0));
  EXPECT_NEAR(m.posterior(x)[0], expected, 1e-12);
  EXPECT_NEAR(m.confidence(x), expected, 1e-12);
  EXPECT_EQ(m.predict(x), 0);
}

TEST(Pwc, EmptyModelIsUniform) {
  PwcModel m(4, 1.0);
  const auto post = m.posterior(std::vector<double>{1.0});
  for (double p : post) EXPECT_DOUBLE_EQ(p, 0.25);
  EXPECT_EQ(m.predict(std::vector<double>{1.0}), 0);
  EXPECT_DOUBLE_EQ(m.confidence(std::vector<double>{1.0}), 0.25);
}

TEST(Pwc, TieBreaksToLowestClassIndex) {
  PwcModel m(2, 1.0);
  m.add({-1.0, 0.0}, 1);
  m.add({1.0, 0.0}, 0);
  EXPECT_EQ(m.predict(std::vector<double>{0.0, 0.0}), 0);
}

TEST(Pwc, DimensionMismatchRejected) {
  PwcModel m(2, 1.0);
  m.add({0.0, 0.0}, 0);
  EXPECT_THROW(m.posterior(std::vector<double>{1.0}), std::invalid_argument);
  EXPECT_THROW(m.add({1.0, 2.0, 3.0}, 1), std::invalid_argument);
}

TEST(Pwc, PosteriorNormalizedOnRandomInputs) {
  Rng rng(11);
  PwcModel m(3, 0.7);
  for (int i = 0; i < 60; ++i) {
    m.add({rng.normal(), rng.normal(), rng.normal()}, static_cast<int>(rng.index(3)));
  }
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> x{rng.normal(0.0, 5.0), rng.normal(0.0, 5.0), rng.normal(0.0, 5.0)};
    const auto post = m.posterior(x);
    double sum = 0.0;
    for (double p : post) {
      EXPECT_GE(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Pwc, StableForExtremelyDistantQueries) {
  PwcModel m(2, 0.1);
  m.add({0.0}, 0);
  m.add({1.0}, 1);
  // raw kernels underflow here; the shifted ratio must stay finite
  const auto post = m.posterior(std::vector<double>{1e6});
  EXPECT_NEAR(post[0] + post[1], 1.0, 1e-9);
  EXPECT_EQ(m.predict(std::vector<double>{1e6}), 1);
}

TEST(Pwc, PredictionInvariantUnderBandwidthUniformRescaling) {
  // multiplying all kernel values by a positive constant cancels in the
  // ratio; realized here as adding a constant shift to all squared distances
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    PwcModel a(2, 1.3);
    PwcModel b(2, 1.3);
    const double dx = rng.uniform(5.0, 9.0);  // rigid shift of everything
    std::vector<double> query{rng.normal(), rng.normal()};
    std::vector<double> shifted{query[0] + dx, query[1]};
    for (int i = 0; i < 20; ++i) {
      const std::vector<double> p{rng.normal(), rng.normal()};
      const int y = static_cast<int>(rng.index(2));
      a.add(p, y);
      b.add({p[0] + dx, p[1]}, y);
    }
    EXPECT_EQ(a.predict(query), b.predict(shifted));
    EXPECT_NEAR(a.confidence(query), b.confidence(shifted), 1e-9);
  }
}

TEST(Pwc, DuplicateTrainingPointNeverLowersItsClassPosterior) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    PwcModel m(2, 0.8);
    std::vector<std::vector<double>> pts;
    std::vector<int> ys;
    for (int i = 0; i < 10; ++i) {
      pts.push_back({rng.normal(), rng.normal()});
      ys.push_back(static_cast<int>(rng.index(2)));
      m.add(pts.back(), ys.back());
    }
    const std::size_t pick = rng.index(pts.size());
    const double before = m.posterior(pts[pick])[static_cast<std::size_t>(ys[pick])];
    m.add(pts[pick], ys[pick]);
    const double after = m.posterior(pts[pick])[static_cast<std::size_t>(ys[pick])];
    EXPECT_GE(after, before - 1e-12);
  }
}

TEST(Pwc, DefaultBandwidthHalvesMeanPairwiseDistance) {
  const std::vector<std::vector<double>> pts{{0.0, 0.0}, {3.0, 4.0}, {0.0, 0.0}};
  // pairwise distances: 5, 0, 5 -> mean 10/3
  EXPECT_NEAR(default_bandwidth(pts), 0.5 * 10.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(default_bandwidth({}), 1.0);
  EXPECT_DOUBLE_EQ(default_bandwidth({{1.0}, {1.0}}), 1.0);  // degenerate
}

TEST(Pwc, RejectsInvalidConstruction) {
  EXPECT_THROW(PwcModel(1, 1.0), std::invalid_argument);
  EXPECT_THROW(PwcModel(2, 0.0), std::invalid_argument);
  EXPECT_THROW(PwcModel(2, -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace streamal
