#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <stdexcept>
#include <vector>

#include "streamal/rng.hpp"

namespace streamal {

/// Exponentially-weighted label-rate accounting (memory s, default 1/l).
/// A strategy may query only while the spent fraction is strictly below the
/// currently allowed budget.
class BudgetAccount {
 public:
  explicit BudgetAccount(double memory) : memory_(memory) {
    if (!(memory > 0.0 && memory <= 1.0)) {
      throw std::invalid_argument("BudgetAccount: memory must be in (0,1]");
    }
  }

  double spent() const { return spent_; }
  bool available(double budget) const { return spent_ < budget; }

  /// Called once per step, whether or not the sample was queried.
  void record(bool queried) {
    spent_ = spent_ * (1.0 - memory_) + (queried ? memory_ : 0.0);
  }

 private:
  double memory_;
  double spent_ = 0.0;
};

/// Query with probability B(t) whenever budget remains.
struct RandomStrategy {
  bool decide(double budget, BudgetAccount& account, Rng& rng) const {
    if (!account.available(budget)) return false;
    return rng.uniform() < budget;
  }
};

// Split strategy: adaptive confidence threshold, half the time randomized by
// a truncated-normal factor so that queries occasionally escape the current
// uncertainty region. The threshold self-regulates: it narrows after each
// query and widens otherwise.
class SplitStrategy {
 public:
  explicit SplitStrategy(double step = 0.01, double spread = 1.0)
      : step_(step), spread_(spread) {}

  double threshold() const { return theta_; }

  bool decide(double budget, double utility, BudgetAccount& account, Rng& rng) {
    if (!account.available(budget)) return false;
    const double confidence = 1.0 - utility;
    double threshold = theta_;
    if (rng.uniform() >= 0.5) {
      threshold = theta_ * std::max(0.0, rng.normal(1.0, spread_));
    }
    const bool query = confidence < threshold;
    theta_ *= query ? (1.0 - step_) : (1.0 + step_);
    return query;
  }

 private:
  double step_;
  double spread_;
  double theta_ = 1.0;
};

/// Expected accuracy improvement at x from one more label, under a
/// Dirichlet(n_c + 1) posterior over the local class distribution, where n_c
/// is the kernel-weighted class frequency around x. Monte-Carlo estimate.
inline double probabilistic_gain(const std::vector<double>& class_mass, int draws, Rng& rng) {
  const std::size_t c = class_mass.size();
  std::size_t current = 0;
  for (std::size_t i = 1; i < c; ++i) {
    if (class_mass[i] > class_mass[current]) current = i;
  }

  std::vector<double> p(c);
  double gain = 0.0;
  for (int d = 0; d < draws; ++d) {
    double total = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      p[i] = rng.gamma(class_mass[i] + 1.0);
      total += p[i];
    }
    for (std::size_t i = 0; i < c; ++i) p[i] /= total;

    // hypothetical label drawn from the local distribution
    double u = rng.uniform();
    std::size_t y = c - 1;
    for (std::size_t i = 0; i < c; ++i) {
      if (u < p[i]) { y = i; break; }
      u -= p[i];
    }

    std::size_t updated = 0;
    double best = class_mass[0] + (y == 0 ? 1.0 : 0.0);
    for (std::size_t i = 1; i < c; ++i) {
      const double m = class_mass[i] + (y == i ? 1.0 : 0.0);
      if (m > best) { best = m; updated = i; }
    }
    gain += p[updated] - p[current];
  }
  return gain / static_cast<double>(draws);
}

// PAL-style strategy: query when the sample's probabilistic gain ranks within
// the top B(t) fraction of the gains seen over the last `capacity` steps.
// Reservoir ranking keeps the budget constraint primary without an absolute
// gain threshold.
class PalStrategy {
 public:
  explicit PalStrategy(std::size_t capacity, int mc_draws = 100)
      : capacity_(capacity), mc_draws_(mc_draws) {}

  bool decide(double budget, const std::vector<double>& class_mass,
              BudgetAccount& account, Rng& rng) {
    if (!account.available(budget)) return false;
    const double gain = probabilistic_gain(class_mass, mc_draws_, rng);
    gains_.push_back(gain);
    if (gains_.size() > capacity_) gains_.pop_front();
    std::size_t higher = 0;
    for (double g : gains_) {
      if (g > gain) ++higher;
    }
    const double frac = static_cast<double>(higher) / static_cast<double>(gains_.size());
    return frac < budget;
  }

  const std::deque<double>& reservoir() const { return gains_; }

 private:
  std::size_t capacity_;
  int mc_draws_;
  std::deque<double> gains_;
};

}  // namespace streamal
