#pragma once

#include <limits>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace streamal {

/// Switch times of the piecewise budget: after a drift at t_drift the budget
/// runs at b_high until t1, at b_low until t2 = t_drift + span, then back to
/// b. The split conserves the total label count over the adjustment span:
/// (t1 - t_drift) * b_high + (t2 - t1) * b_low == b * span.
inline std::pair<double, double> schedule_times(double b, double b_high,
                                                double b_low, double span,
                                                double t_drift) {
  if (b_high == b_low) throw std::invalid_argument("degenerate budget levels");
  const double t1 = t_drift + span * (b - b_low) / (b_high - b_low);
  const double t2 = t1 + span * (b_high - b) / (b_high - b_low);
  return {t1, t2};
}

// Drift-driven piecewise-constant budget. Boundary points go to the
// left-closed interval: [t_drift, t1) -> b_high, [t1, t2) -> b_low.
// A drift during an active adjustment restarts the schedule.
class BudgetSchedule {
 public:
  BudgetSchedule(double b, double m_high, double m_low, double span)
      : base_(b), high_(b * m_high), low_(b * m_low), span_(span) {
    if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("budget must be in (0,1]");
    if (span <= 0.0) throw std::invalid_argument("adjustment span must be positive");
    if (!(low_ > 0.0 && low_ < base_ && base_ < high_ && high_ <= 1.0)) {
      throw std::invalid_argument("budget levels must satisfy 0 < b_low < b < b_high <= 1");
    }
  }

  double base() const { return base_; }
  double high() const { return high_; }
  double low() const { return low_; }
  double span() const { return span_; }
  double drift_time() const { return t_drift_; }
  double t1() const { return t1_; }
  double t2() const { return t2_; }
  bool drift_seen() const { return t_drift_ != kNoDrift; }

  void on_drift(double t) {
    t_drift_ = t;
    std::tie(t1_, t2_) = schedule_times(base_, high_, low_, span_, t);
  }

  double at(double t) const {
    if (!drift_seen()) return base_;
    if (t >= t_drift_ && t < t1_) return high_;
    if (t >= t1_ && t < t2_) return low_;
    return base_;
  }

 private:
  static constexpr double kNoDrift = std::numeric_limits<double>::infinity();

  double base_, high_, low_, span_;
  double t_drift_ = kNoDrift;
  double t1_ = kNoDrift;
  double t2_ = kNoDrift;
};

}  // namespace streamal
