#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace streamal {

/// Gaussian kernel K(x, x') = exp(-||x - x'||^2 / (2 sigma^2)).
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Parzen Window Classifier: kernel-sum posterior over a training set picked
// from the window at call time. Nonparametric; "training" is set selection.
class PwcModel {
 public:
  PwcModel(int n_classes, double bandwidth)
      : n_classes_(n_classes), bandwidth_(bandwidth) {
    if (n_classes < 2) throw std::invalid_argument("PwcModel: need >= 2 classes");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("PwcModel: bandwidth must be positive");
  }

  void add(const std::vector<double>& x, int y) {
    if (!points_.empty() && x.size() != dim_) {
      throw std::invalid_argument("PwcModel: dimension mismatch in training point");
    }
    dim_ = x.size();
    points_.push_back(x);
    labels_.push_back(y);
  }

  std::size_t size() const { return points_.size(); }
  int n_classes() const { return n_classes_; }
  double bandwidth() const { return bandwidth_; }

  /// p(c|x) as the class-wise share of kernel mass. The kernel sums are
  /// computed relative to the nearest training point so that distant queries
  /// do not underflow; the posterior is a ratio, so the shift cancels.
  std::vector<double> posterior(std::span<const double> x) const {
    check_dim(x);
    std::vector<double> post(static_cast<std::size_t>(n_classes_),
                             1.0 / static_cast<double>(n_classes_));
    if (points_.empty()) return post;

    std::vector<double> d2(points_.size());
    double d2_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      d2[i] = squared_distance(x, points_[i]);
      if (d2[i] < d2_min) d2_min = d2[i];
    }
    const double inv = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    std::fill(post.begin(), post.end(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double w = std::exp(-(d2[i] - d2_min) * inv);
      post[static_cast<std::size_t>(labels_[i])] += w;
      total += w;
    }
    for (double& p : post) p /= total;
    return post;
  }

  /// Raw per-class kernel mass (no shift); used as the local label-frequency
  /// estimate n_c by the probabilistic-gain strategy.
  std::vector<double> class_kernel_mass(std::span<const double> x) const {
    check_dim(x);
    std::vector<double> mass(static_cast<std::size_t>(n_classes_), 0.0);
    const double inv = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      mass[static_cast<std::size_t>(labels_[i])] +=
          std::exp(-squared_distance(x, points_[i]) * inv);
    }
    return mass;
  }

  /// Argmax of the posterior; ties break toward the lowest class index.
  int predict(std::span<const double> x) const {
    const std::vector<double> post = posterior(x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < post.size(); ++c) {
      if (post[c] > post[best]) best = c;
    }
    return static_cast<int>(best);
  }

  /// Max posterior component, in [1/C, 1].
  double confidence(std::span<const double> x) const {
    const std::vector<double> post = posterior(x);
    double best = post[0];
    for (double p : post) best = std::max(best, p);
    return best;
  }

 private:
  void check_dim(std::span<const double> x) const {
    if (!points_.empty() && x.size() != dim_) {
      throw std::invalid_argument("PwcModel: query dimension mismatch");
    }
  }

  int n_classes_;
  double bandwidth_;
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> points_;
  std::vector<int> labels_;
};

/// Data-driven default bandwidth: the mean nearest-neighbor distance of the
/// given points. This tracks the local structure scale of the data rather
/// than the domain size. Falls back to 1 when the points are degenerate.
inline double default_bandwidth(const std::vector<std::vector<double>>& points) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      nearest = std::min(nearest, squared_distance(points[i], points[j]));
    }
    if (std::isfinite(nearest)) {
      sum += std::sqrt(nearest);
      ++count;
    }
  }
  if (count == 0 || sum == 0.0) return 1.0;
  return sum / static_cast<double>(count);
}

}  // namespace streamal
