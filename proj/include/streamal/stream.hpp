#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

namespace streamal {

using TimeStep = std::int64_t;

/// One timestamped sample. `label` is hidden from the learner; only the
/// oracle and the evaluation harness may look at it.
struct StreamEvent {
  TimeStep t = 0;
  std::vector<double> x;
  int label = -1;
};

enum class LabelState { kUnlabeled, kPending, kLabeled, kPropagated };

struct WindowEntry {
  StreamEvent event;
  LabelState state = LabelState::kUnlabeled;
  TimeStep due = -1;  // valid while a query is outstanding (Pending/Propagated)
  int label = -1;     // true label if Labeled, imputed label if Propagated

  bool has_open_query() const {
    return state == LabelState::kPending || state == LabelState::kPropagated;
  }
};

enum class AttachResult { kAttached, kDropped, kDuplicate };

struct WindowPartition {
  std::vector<std::size_t> labeled;
  std::vector<std::size_t> pending;
  std::vector<std::size_t> unlabeled;
  std::vector<std::size_t> propagated;
};

// Sliding training window over the latest `capacity` samples. Entries are
// ordered by timestamp; eviction drops the oldest. A true label is terminal:
// it is never replaced by a propagated one.
class SlidingWindow {
 public:
  explicit SlidingWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("window capacity must be positive");
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const WindowEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::deque<WindowEntry>& entries() const { return entries_; }

  /// Append a new sample as Unlabeled, evicting the oldest entry when full.
  /// Timestamps must be strictly increasing.
  void push(const StreamEvent& e) {
    if (!entries_.empty() && e.t <= entries_.back().event.t) {
      throw std::invalid_argument("non-monotone timestamp pushed into window");
    }
    entries_.push_back(WindowEntry{e, LabelState::kUnlabeled, -1, -1});
    if (entries_.size() > capacity_) entries_.pop_front();
  }

  std::optional<std::size_t> find(TimeStep t) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), t,
        [](const WindowEntry& e, TimeStep v) { return e.event.t < v; });
    if (it == entries_.end() || it->event.t != t) return std::nullopt;
    return static_cast<std::size_t>(it - entries_.begin());
  }

  /// Deliver a true label for timestamp `t`. Deliveries to evicted samples
  /// are discarded and counted; a second delivery to the same sample is a
  /// flagged error, the first label stands.
  AttachResult attach_label(TimeStep t, int y) {
    auto idx = find(t);
    if (!idx) {
      ++dropped_deliveries_;
      return AttachResult::kDropped;
    }
    WindowEntry& e = entries_[*idx];
    if (e.state == LabelState::kLabeled) {
      ++duplicate_deliveries_;
      return AttachResult::kDuplicate;
    }
    e.state = LabelState::kLabeled;
    e.label = y;
    e.due = -1;
    return AttachResult::kAttached;
  }

  /// Record an outstanding oracle query for the sample at `t`.
  void mark_pending(TimeStep t, TimeStep due) {
    auto idx = find(t);
    if (!idx) throw std::invalid_argument("mark_pending: timestamp not in window");
    WindowEntry& e = entries_[*idx];
    if (e.state != LabelState::kUnlabeled) {
      throw std::invalid_argument("mark_pending: entry already queried or labeled");
    }
    e.state = LabelState::kPending;
    e.due = due;
  }

  void set_propagated(std::size_t idx, int label) {
    WindowEntry& e = entries_.at(idx);
    if (!e.has_open_query()) {
      throw std::invalid_argument("set_propagated: entry has no open query");
    }
    e.state = LabelState::kPropagated;
    e.label = label;
  }

  /// Revert Propagated entries to Pending; propagation is recomputed from
  /// scratch each step.
  void clear_propagated() {
    for (auto& e : entries_) {
      if (e.state == LabelState::kPropagated) {
        e.state = LabelState::kPending;
        e.label = -1;
      }
    }
  }

  WindowPartition partition() const {
    WindowPartition p;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      switch (entries_[i].state) {
        case LabelState::kLabeled: p.labeled.push_back(i); break;
        case LabelState::kPending: p.pending.push_back(i); break;
        case LabelState::kUnlabeled: p.unlabeled.push_back(i); break;
        case LabelState::kPropagated: p.propagated.push_back(i); break;
      }
    }
    return p;
  }

  long long dropped_deliveries() const { return dropped_deliveries_; }
  long long duplicate_deliveries() const { return duplicate_deliveries_; }

 private:
  std::size_t capacity_;
  std::deque<WindowEntry> entries_;
  long long dropped_deliveries_ = 0;
  long long duplicate_deliveries_ = 0;
};

}  // namespace streamal
