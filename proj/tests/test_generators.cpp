#include "streamal/generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

namespace streamal {
namespace {

bool streams_equal(const std::vector<StreamEvent>& a, const std::vector<StreamEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].t != b[i].t || a[i].label != b[i].label || a[i].x != b[i].x) return false;
  }
  return true;
}

std::map<int, int> class_counts(const std::vector<StreamEvent>& s) {
  std::map<int, int> counts;
  for (const auto& e : s) counts[e.label]++;
  return counts;
}

TEST(Rbf, PresetRbf22Shape) {
  const auto stream = generate(stream_preset("rbf_2_2"));
  ASSERT_EQ(stream.size(), 4000u);
  EXPECT_EQ(stream.front().t, 1);
  EXPECT_EQ(stream.back().t, 4000);
  for (const auto& e : stream) ASSERT_EQ(e.x.size(), 2u);
  const auto counts = class_counts(stream);
  ASSERT_EQ(counts.size(), 2u);
  for (const auto& [cls, n] : counts) EXPECT_NEAR(n, 2000, 200);  // balanced within 10%
}

TEST(Rbf, PresetRbf104Shape) {
  const auto stream = generate(stream_preset("rbf_10_4"));
  ASSERT_EQ(stream.size(), 4000u);
  for (const auto& e : stream) ASSERT_EQ(e.x.size(), 10u);
  const auto counts = class_counts(stream);
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [cls, n] : counts) EXPECT_NEAR(n, 1000, 100);
}

TEST(Rbf, DeterministicInSeed) {
  StreamSpec spec = stream_preset("rbf_2_2");
  spec.seed = 31;
  EXPECT_TRUE(streams_equal(generate(spec), generate(spec)));
  StreamSpec other = spec;
  other.seed = 32;
  EXPECT_FALSE(streams_equal(generate(spec), generate(other)));
}

TEST(Rbf, RejectsInvalidDims) {
  StreamSpec spec = stream_preset("rbf_2_2");
  spec.dim = 0;
  EXPECT_THROW(generate(spec), std::invalid_argument);
  spec = stream_preset("rbf_2_2");
  spec.n_classes = 1;
  EXPECT_THROW(generate(spec), std::invalid_argument);
}

TEST(Hyperplane, PresetShapeAndLabels) {
  StreamSpec spec = stream_preset("hyperplane");
  spec.seed = 5;
  const auto stream = generate(spec);
  ASSERT_EQ(stream.size(), 4000u);
  const auto counts = class_counts(stream);
  ASSERT_EQ(counts.size(), 2u);
  // through-center hyperplane on the unit cube: roughly balanced
  EXPECT_NEAR(counts.at(0), 2000, 300);

  // labels agree with the generating hyperplane
  Rng rng(mix_seed(5, 2));
  const HyperplaneParams params = make_hyperplane_params(2, rng);
  for (const auto& e : stream) {
    ASSERT_EQ(e.label, hyperplane_label(params, e.x));
  }
}

TEST(Hyperplane, PositiveSideIsClassOne) {
  Rng rng(mix_seed(7, 2));
  const HyperplaneParams p = make_hyperplane_params(3, rng);
  std::vector<double> x{0.9, 0.4, 0.1};
  double dot = 0.0;
  for (std::size_t i = 0; i < 3; ++i) dot += p.weights[i] * x[i];
  EXPECT_EQ(hyperplane_label(p, x), dot > p.threshold ? 1 : 0);
}

TEST(Hyperplane, DeterministicInSeed) {
  StreamSpec spec = stream_preset("hyperplane");
  spec.seed = 11;
  EXPECT_TRUE(streams_equal(generate(spec), generate(spec)));
}

TEST(Stagger, PresetShapeAndRule) {
  StreamSpec spec = stream_preset("stagger");
  spec.seed = 3;
  const auto stream = generate(spec);
  ASSERT_EQ(stream.size(), 4000u);
  for (const auto& e : stream) ASSERT_EQ(e.x.size(), 2u);
  const auto counts = class_counts(stream);
  ASSERT_EQ(counts.size(), 2u);
  // rule "color = green OR shape = circular" holds for 5/9 of samples
  EXPECT_NEAR(static_cast<double>(counts.at(1)) / 4000.0, 5.0 / 9.0, 0.05);
}

TEST(Stagger, RuleDefinition) {
  EXPECT_TRUE(stagger_rule(0, 1, 0));   // green
  EXPECT_TRUE(stagger_rule(2, 0, 1));   // circular
  EXPECT_TRUE(stagger_rule(1, 1, 1));
  EXPECT_FALSE(stagger_rule(0, 0, 0));
  EXPECT_FALSE(stagger_rule(2, 2, 2));
}

TEST(Stagger, EncodingSeparatesAttributeTriples) {
  std::vector<std::array<double, 2>> seen;
  for (int s = 0; s < 3; ++s)
    for (int c = 0; c < 3; ++c)
      for (int h = 0; h < 3; ++h) seen.push_back(stagger_encode(s, c, h));
  std::sort(seen.begin(), seen.end());
  EXPECT_TRUE(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST(Stagger, DeterministicInSeed) {
  StreamSpec spec = stream_preset("stagger");
  spec.seed = 17;
  EXPECT_TRUE(streams_equal(generate(spec), generate(spec)));
}

TEST(MutualInformation, InformativeVsNoiseFeature) {
  Rng rng(21);
  std::vector<double> informative, noise;
  std::vector<int> labels;
  for (int i = 0; i < 2000; ++i) {
    const int y = static_cast<int>(rng.index(2));
    labels.push_back(y);
    informative.push_back(rng.normal(y == 0 ? -1.0 : 1.0, 0.3));
    noise.push_back(rng.normal());
  }
  EXPECT_GT(mutual_information(informative, labels), 0.4);
  EXPECT_LT(mutual_information(noise, labels), 0.05);
}

// two-sample Kolmogorov-Smirnov statistic, test-side oracle
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

TEST(DriftInjection, StartsExactlyAtPositionAndOnlyTouchesVictims) {
  StreamSpec spec = stream_preset("rbf_2_2");
  spec.seed = 9;
  const auto clean = generate(spec);
  auto drifted = clean;
  inject_gradual_drift(drifted, DriftSpec{0.5, 100, 1}, spec.seed);

  const std::vector<std::size_t> order = rank_features_by_mi(clean, 2000);
  const std::size_t victim = order[0];
  const std::size_t untouched = order[1];

  for (std::size_t i = 0; i < 2000; ++i) {
    ASSERT_EQ(clean[i].x, drifted[i].x) << "sample " << i << " changed before the drift";
  }
  bool any_changed = false;
  for (std::size_t i = 2000; i < 4000; ++i) {
    ASSERT_EQ(clean[i].x[untouched], drifted[i].x[untouched]);
    ASSERT_EQ(clean[i].label, drifted[i].label);
    any_changed |= clean[i].x[victim] != drifted[i].x[victim];
  }
  EXPECT_TRUE(any_changed);
}

TEST(DriftInjection, DestroysAssociationButPreservesMarginal) {
  StreamSpec spec = stream_preset("rbf_2_2");
  spec.seed = 13;
  const auto clean = generate(spec);
  auto drifted = clean;
  inject_gradual_drift(drifted, DriftSpec{0.5, 1, 1}, spec.seed);
  const std::size_t victim = rank_features_by_mi(clean, 2000)[0];

  std::vector<double> pre, post;
  std::vector<int> post_labels;
  for (std::size_t i = 0; i < 2000; ++i) pre.push_back(drifted[i].x[victim]);
  for (std::size_t i = 2000; i < 4000; ++i) {
    post.push_back(drifted[i].x[victim]);
    post_labels.push_back(drifted[i].label);
  }

  // association with the label is gone...
  const double mi_post = mutual_information(post, post_labels);
  std::vector<double> clean_pre;
  std::vector<int> pre_labels;
  for (std::size_t i = 0; i < 2000; ++i) {
    clean_pre.push_back(clean[i].x[victim]);
    pre_labels.push_back(clean[i].label);
  }
  const double mi_pre = mutual_information(clean_pre, pre_labels);
  EXPECT_GT(mi_pre, 5.0 * mi_post);
  EXPECT_LT(mi_post, 0.05);

  // ...while the marginal distribution is preserved
  EXPECT_LT(ks_statistic(pre, post), 0.1);
}

TEST(DriftInjection, WidthOneIsAbrupt) {
  StreamSpec spec = stream_preset("rbf_2_2");
  spec.seed = 2;
  const auto clean = generate(spec);
  auto drifted = clean;
  inject_gradual_drift(drifted, DriftSpec{0.5, 1, 1}, spec.seed);
  const std::size_t victim = rank_features_by_mi(clean, 2000)[0];
  // at full strength every post-drift sample is redrawn; count agreements
  int unchanged = 0;
  for (std::size_t i = 2000; i < 4000; ++i) {
    unchanged += clean[i].x[victim] == drifted[i].x[victim];
  }
  EXPECT_LT(unchanged, 40);  // only chance collisions with the pool
}

TEST(DriftInjection, RampIsGradual) {
  StreamSpec spec = stream_preset("rbf_2_2");
  spec.seed = 4;
  const auto clean = generate(spec);
  auto drifted = clean;
  inject_gradual_drift(drifted, DriftSpec{0.5, 1000, 1}, spec.seed);
  const std::size_t victim = rank_features_by_mi(clean, 2000)[0];
  int early = 0, late = 0;
  for (std::size_t i = 2000; i < 2250; ++i) early += clean[i].x[victim] != drifted[i].x[victim];
  for (std::size_t i = 2750; i < 3000; ++i) late += clean[i].x[victim] != drifted[i].x[victim];
  EXPECT_LT(early, late);
  EXPECT_LT(early, 125);  // corruption probability averages 1/8 here
  EXPECT_GT(late, 175);   // and 7/8 here
}

TEST(DriftInjection, TooManyFeaturesRejected) {
  StreamSpec spec = stream_preset("rbf_2_2");
  auto stream = generate(spec);
  EXPECT_THROW(inject_gradual_drift(stream, DriftSpec{0.5, 1, 3}, 0), std::invalid_argument);
}

class CsvFixture : public ::testing::Test {
 protected:
  std::filesystem::path dir_ = std::filesystem::temp_directory_path() / "streamal_csv_test";

  void SetUp() override { std::filesystem::create_directories(dir_); }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    std::ofstream out(p);
    out << content;
    return p;
  }
};

TEST_F(CsvFixture, ThreeRowFile) {
  const auto p = write("tiny.csv", "a,b,label\n1,2,x\n3,4,y\n5,6,x\n");
  const auto stream = load_csv_stream(p.string(), "label");
  ASSERT_EQ(stream.size(), 3u);
  EXPECT_EQ(stream[0].t, 1);
  EXPECT_EQ(stream[1].t, 2);
  EXPECT_EQ(stream[2].t, 3);
  EXPECT_EQ(stream[0].label, 0);  // classes by first appearance
  EXPECT_EQ(stream[1].label, 1);
  EXPECT_EQ(stream[2].label, 0);
  ASSERT_EQ(stream[0].x.size(), 2u);
}

TEST_F(CsvFixture, FeaturesAreStandardized) {
  const auto p = write("std.csv", "f,label\n10,a\n20,a\n30,b\n40,b\n");
  const auto stream = load_csv_stream(p.string(), "label");
  double mean = 0.0, var = 0.0;
  for (const auto& e : stream) mean += e.x[0];
  mean /= 4.0;
  for (const auto& e : stream) var += (e.x[0] - mean) * (e.x[0] - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(var / 4.0, 1.0, 1e-12);
}

TEST_F(CsvFixture, MalformedCellNamesRowAndColumn) {
  const auto p = write("bad.csv", "a,b,label\n1,2,x\n1,oops,y\n");
  try {
    load_csv_stream(p.string(), "label");
    FAIL() << "expected parse error";
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
  }
}

TEST_F(CsvFixture, UnknownLabelColumnRejected) {
  const auto p = write("col.csv", "a,b,label\n1,2,x\n");
  EXPECT_THROW(load_csv_stream(p.string(), "target"), std::runtime_error);
}

TEST_F(CsvFixture, MissingFileRejected) {
  EXPECT_THROW(load_csv_stream((dir_ / "nope.csv").string(), "label"), std::runtime_error);
}

}  // namespace
}  // namespace streamal
