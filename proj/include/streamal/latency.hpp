#pragma once

#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "streamal/rng.hpp"
#include "streamal/stream.hpp"

namespace streamal {

/// Per-query verification latency. UniformShift draws an integer delay from
/// U(50, 50 + delta); TruncatedNormal draws max(0, round(N(delta, 50))), so
/// even delta = 0 leaves about half of the labels delayed.
struct LatencyDistribution {
  enum class Kind { kUniformShift, kTruncatedNormal };

  Kind kind = Kind::kUniformShift;
  double delta = 0.0;

  static constexpr double kUniformBase = 50.0;
  static constexpr double kNormalStddev = 50.0;

  TimeStep sample(Rng& rng) const {
    switch (kind) {
      case Kind::kUniformShift:
        return rng.uniform_int(static_cast<TimeStep>(kUniformBase),
                               static_cast<TimeStep>(kUniformBase + delta));
      case Kind::kTruncatedNormal: {
        const auto d = static_cast<TimeStep>(std::llround(rng.normal(delta, kNormalStddev)));
        return d < 0 ? 0 : d;
      }
    }
    return 0;
  }
};

struct Delivery {
  TimeStep t_query = 0;
  TimeStep due = 0;
  int label = -1;
};

// Simulated labeling oracle. Labels are always correct; only their arrival
// is delayed. Pending queries sit in a min-heap keyed by (due, t_query).
class LabelOracle {
 public:
  /// Register a query made at `t_query`; returns the due time
  /// t_query + delay. Querying the same timestamp twice is rejected.
  TimeStep enqueue(TimeStep t_query, int y_true, const LatencyDistribution& dist, Rng& rng) {
    if (!queried_.insert(t_query).second) {
      throw std::invalid_argument("LabelOracle: duplicate query for timestamp");
    }
    const TimeStep due = t_query + dist.sample(rng);
    heap_.push(Delivery{t_query, due, y_true});
    return due;
  }

  /// Remove and return everything with due <= now, ordered by (due, t_query).
  std::vector<Delivery> deliver_due(TimeStep now) {
    std::vector<Delivery> out;
    while (!heap_.empty() && heap_.top().due <= now) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    return out;
  }

  std::size_t pending_count() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Delivery& a, const Delivery& b) const {
      if (a.due != b.due) return a.due > b.due;
      return a.t_query > b.t_query;
    }
  };

  std::priority_queue<Delivery, std::vector<Delivery>, Later> heap_;
  std::unordered_set<TimeStep> queried_;
};

}  // namespace streamal
