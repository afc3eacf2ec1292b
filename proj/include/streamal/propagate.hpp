#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "streamal/classifier.hpp"
#include "streamal/stream.hpp"

namespace streamal {

struct PrConfig {
  int k = 3;            // neighbors for the label propagation
  double lambda = 0.01; // decay of the time weight
};

/// Time weight w = exp(-lambda * (t_i - t_j)^2). Newer labels weigh more:
/// they are less likely to be outdated than older ones.
inline double time_weight(double t_i, double t_j, double lambda) {
  const double dt = t_i - t_j;
  return std::exp(-lambda * dt * dt);
}

/// Impute a label for every entry with an outstanding query by a
/// time-weighted majority vote over its k nearest labeled neighbors
/// (Euclidean distance in feature space, restricted to the window).
/// Ties go to the class of the most recent contributing neighbor.
/// No-op when the window holds no labeled entry.
inline void propagate_pending(SlidingWindow& window, const PrConfig& cfg) {
  std::vector<std::size_t> labeled;
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (window[i].state == LabelState::kLabeled) labeled.push_back(i);
  }
  if (labeled.empty()) return;

  const std::size_t k = static_cast<std::size_t>(std::max(cfg.k, 1));
  std::vector<std::pair<double, std::size_t>> dist;  // (distance^2, labeled idx)
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (!window[i].has_open_query()) continue;
    const auto& xi = window[i].event.x;

    dist.clear();
    for (std::size_t j : labeled) {
      dist.emplace_back(squared_distance(xi, window[j].event.x), j);
    }
    const std::size_t kn = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kn), dist.end());

    // score(c) = sum of time weights of the neighbors voting for c
    std::vector<double> score;
    std::vector<TimeStep> newest;  // most recent neighbor time per class
    for (std::size_t m = 0; m < kn; ++m) {
      const WindowEntry& nb = window[dist[m].second];
      const auto c = static_cast<std::size_t>(nb.label);
      if (c >= score.size()) {
        score.resize(c + 1, 0.0);
        newest.resize(c + 1, std::numeric_limits<TimeStep>::min());
      }
      score[c] += time_weight(static_cast<double>(window[i].event.t),
                              static_cast<double>(nb.event.t), cfg.lambda);
      newest[c] = std::max(newest[c], nb.event.t);
    }

    std::size_t best = 0;
    for (std::size_t c = 1; c < score.size(); ++c) {
      if (score[c] > score[best] ||
          (score[c] == score[best] && newest[c] > newest[best])) {
        best = c;
      }
    }
    window.set_propagated(i, static_cast<int>(best));
  }
}

/// PWC built from the window's Labeled entries, optionally also the
/// Propagated ones ("true and predicted labels").
inline PwcModel window_model(const SlidingWindow& window, bool include_propagated,
                             int n_classes, double bandwidth) {
  PwcModel model(n_classes, bandwidth);
  for (std::size_t i = 0; i < window.size(); ++i) {
    const WindowEntry& e = window[i];
    if (e.state == LabelState::kLabeled ||
        (include_propagated && e.state == LabelState::kPropagated)) {
      model.add(e.event.x, e.label);
    }
  }
  return model;
}

/// PRopagate utility: impute pending labels, refit, return the uncertainty
/// 1 - confidence at x (higher = more useful to label).
inline double utility_propagate(SlidingWindow& window, const std::vector<double>& x,
                                const PrConfig& cfg, int n_classes, double bandwidth) {
  window.clear_propagated();
  propagate_pending(window, cfg);
  const PwcModel model = window_model(window, true, n_classes, bandwidth);
  return 1.0 - model.confidence(x);
}

/// Baseline utility that ignores pending queries entirely.
inline double utility_ignore_pending(const SlidingWindow& window, const std::vector<double>& x,
                                     int n_classes, double bandwidth) {
  const PwcModel model = window_model(window, false, n_classes, bandwidth);
  return 1.0 - model.confidence(x);
}

}  // namespace streamal
