#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace streamal {

enum class DdmStatus { kStable, kWarning, kDrift };

// Drift Detection Model on a {0,1} error stream. Tracks the running error
// rate p and its binomial deviation s; fires when p + s rises 3 (warning: 2)
// standard deviations above the best (p_min + s_min) seen so far.
class DdmDetector {
 public:
  explicit DdmDetector(int warmup = 30) : warmup_(warmup) {}

  DdmStatus update(bool error) {
    ++n_;
    p_ += (static_cast<double>(error) - p_) / static_cast<double>(n_);
    const double s = std::sqrt(p_ * (1.0 - p_) / static_cast<double>(n_));
    if (n_ < warmup_) return DdmStatus::kStable;
    if (p_ + s < p_min_ + s_min_) {
      p_min_ = p_;
      s_min_ = s;
    }
    if (p_ + s > p_min_ + 3.0 * s_min_) {
      reset();
      return DdmStatus::kDrift;
    }
    if (p_ + s > p_min_ + 2.0 * s_min_) return DdmStatus::kWarning;
    return DdmStatus::kStable;
  }

  void reset() {
    n_ = 0;
    p_ = 0.0;
    p_min_ = std::numeric_limits<double>::infinity();
    s_min_ = std::numeric_limits<double>::infinity();
  }

  long long observed() const { return n_; }
  double error_rate() const { return p_; }

 private:
  int warmup_;
  long long n_ = 0;
  double p_ = 0.0;
  double p_min_ = std::numeric_limits<double>::infinity();
  double s_min_ = std::numeric_limits<double>::infinity();
};

// ADWIN: adaptive window over a real-valued stream in [0,1], compressed into
// exponential buckets (at most `max_buckets` per size class). A cut between
// two sub-windows whose means differ beyond the Hoeffding-style bound drops
// the older sub-window.
class AdwinDetector {
 public:
  explicit AdwinDetector(double delta = 0.002, int max_buckets = 5)
      : delta_(delta), max_buckets_(max_buckets) {}

  bool update(double value) {
    buckets_.push_back(Bucket{value, 1});
    total_sum_ += value;
    total_count_ += 1;
    compress();
    return shrink();
  }

  long long window_size() const { return total_count_; }
  double mean() const {
    return total_count_ == 0 ? 0.0 : total_sum_ / static_cast<double>(total_count_);
  }

 private:
  struct Bucket {
    double sum = 0.0;
    long long count = 0;
  };

  // Merge the two oldest buckets of any size class that exceeds capacity.
  // Counts are powers of two and non-increasing from oldest (front) to
  // newest (back), so same-size buckets are adjacent.
  void compress() {
    long long size = 1;
    for (;;) {
      std::size_t first = buckets_.size();
      std::size_t n = 0;
      for (std::size_t i = 0; i < buckets_.size(); ++i) {
        if (buckets_[i].count == size) {
          if (n == 0) first = i;
          ++n;
        }
      }
      if (n == 0) break;
      if (n > static_cast<std::size_t>(max_buckets_)) {
        buckets_[first].sum += buckets_[first + 1].sum;
        buckets_[first].count += buckets_[first + 1].count;
        buckets_.erase(buckets_.begin() + static_cast<std::ptrdiff_t>(first) + 1);
        continue;  // the merge may overflow the next size class
      }
      size *= 2;
    }
  }

  // Check every bucket boundary; while some cut violates the bound, drop the
  // oldest bucket. Returns whether anything was dropped.
  bool shrink() {
    if (total_count_ < 10) return false;
    bool shrunk = false;
    bool violated = true;
    while (violated && buckets_.size() > 1) {
      violated = false;
      const double delta_n = delta_ / static_cast<double>(total_count_);
      const double log_term = std::log(4.0 / delta_n);
      double n0 = 0.0, sum0 = 0.0;
      for (std::size_t i = 0; i + 1 < buckets_.size(); ++i) {
        n0 += static_cast<double>(buckets_[i].count);
        sum0 += buckets_[i].sum;
        const double n1 = static_cast<double>(total_count_) - n0;
        const double u0 = sum0 / n0;
        const double u1 = (total_sum_ - sum0) / n1;
        const double m = 1.0 / (1.0 / n0 + 1.0 / n1);
        const double eps = std::sqrt(log_term / (2.0 * m));
        if (std::fabs(u0 - u1) > eps) {
          total_sum_ -= buckets_.front().sum;
          total_count_ -= buckets_.front().count;
          buckets_.pop_front();
          shrunk = true;
          violated = true;
          break;
        }
      }
    }
    return shrunk;
  }

  double delta_;
  int max_buckets_;
  std::deque<Bucket> buckets_;
  double total_sum_ = 0.0;
  long long total_count_ = 0;
};

/// Hellinger distance sqrt(1 - sum_i sqrt(p_i q_i)) between two normalized
/// histograms. 0 iff identical, 1 iff disjoint supports.
inline double hellinger_distance(const std::vector<double>& p, const std::vector<double>& q) {
  double bc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
  return std::sqrt(std::max(0.0, 1.0 - bc));
}

// HDDDM: unsupervised detector comparing per-feature histograms of incoming
// batches against a reference window. Fires when the change in the averaged
// Hellinger distance exceeds the adaptive threshold mean + gamma * std of
// the historical changes; the reference then restarts from the current
// batch, otherwise the batch is merged into the reference.
class HdddmDetector {
 public:
  explicit HdddmDetector(std::size_t batch_size = 100, double gamma = 1.0)
      : batch_size_(batch_size),
        gamma_(gamma),
        bins_(static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(batch_size))))) {
    if (batch_size < 2) throw std::invalid_argument("HdddmDetector: batch size too small");
  }

  bool update(const std::vector<double>& x) {
    batch_.push_back(x);
    if (batch_.size() < batch_size_) return false;

    bool drift = false;
    if (reference_.empty()) {
      reference_ = batch_;
    } else {
      const double h = mean_hellinger();
      if (have_last_) {
        const double dh = std::fabs(h - last_h_);
        if (increments_.size() >= 2) {
          const double mean = std::accumulate(increments_.begin(), increments_.end(), 0.0) /
                              static_cast<double>(increments_.size());
          double var = 0.0;
          for (double v : increments_) var += (v - mean) * (v - mean);
          const double sd = std::sqrt(var / static_cast<double>(increments_.size()));
          drift = dh > mean + gamma_ * sd;
        }
        if (!drift) increments_.push_back(dh);
      }
      if (drift) {
        reference_ = batch_;
        increments_.clear();
        have_last_ = false;
      } else {
        reference_.insert(reference_.end(), batch_.begin(), batch_.end());
        last_h_ = h;
        have_last_ = true;
      }
    }
    batch_.clear();
    return drift;
  }

  std::size_t reference_size() const { return reference_.size(); }
  std::size_t batch_fill() const { return batch_.size(); }

 private:
  // Average over features of the Hellinger distance between reference and
  // batch histograms, binned on the combined value range.
  double mean_hellinger() const {
    const std::size_t dim = reference_.front().size();
    double total = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (const auto& r : reference_) { lo = std::min(lo, r[f]); hi = std::max(hi, r[f]); }
      for (const auto& b : batch_) { lo = std::min(lo, b[f]); hi = std::max(hi, b[f]); }
      if (!(hi > lo)) continue;  // constant feature contributes distance 0

      std::vector<double> p(bins_, 0.0), q(bins_, 0.0);
      const double scale = static_cast<double>(bins_) / (hi - lo);
      auto bin_of = [&](double v) {
        auto i = static_cast<std::size_t>((v - lo) * scale);
        return std::min(i, bins_ - 1);
      };
      for (const auto& r : reference_) p[bin_of(r[f])] += 1.0;
      for (const auto& b : batch_) q[bin_of(b[f])] += 1.0;
      for (double& v : p) v /= static_cast<double>(reference_.size());
      for (double& v : q) v /= static_cast<double>(batch_.size());
      total += hellinger_distance(p, q);
    }
    return total / static_cast<double>(dim);
  }

  std::size_t batch_size_;
  double gamma_;
  std::size_t bins_;
  std::vector<std::vector<double>> reference_;
  std::vector<std::vector<double>> batch_;
  std::vector<double> increments_;
  double last_h_ = 0.0;
  bool have_last_ = false;
};

}  // namespace streamal
