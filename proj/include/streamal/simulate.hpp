#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "streamal/budget.hpp"
#include "streamal/classifier.hpp"
#include "streamal/drift.hpp"
#include "streamal/latency.hpp"
#include "streamal/propagate.hpp"
#include "streamal/rng.hpp"
#include "streamal/schedule.hpp"
#include "streamal/stream.hpp"

namespace streamal {

enum class StrategyKind { kRandom, kSplit, kPal };
enum class EstimatorKind { kPropagate, kIgnorePending };
enum class DetectorKind { kNone, kDdm, kAdwin, kHdddm };

struct SimConfig {
  std::size_t window = 500;
  int init_samples = 100;
  double budget = 0.1;  // nominal b; 0 disables querying entirely
  LatencyDistribution latency;
  StrategyKind strategy = StrategyKind::kSplit;
  EstimatorKind estimator = EstimatorKind::kPropagate;
  DetectorKind detector = DetectorKind::kNone;

  bool dynamic_budget = false;
  double m_high = 4.0;
  double m_low = 0.5;
  double adjust_span = 1000.0;  // delta T

  PrConfig pr;
  double bandwidth = 0.0;  // 0: half the mean pairwise distance of the init set
  bool train_on_propagated = true;
  bool deliver_same_step = false;  // due == t labels attach after the query phase

  double split_step = 0.01;
  double split_spread = 1.0;
  int pal_mc_draws = 100;
  double adwin_delta = 0.002;
  int ddm_warmup = 30;
  std::size_t hdddm_batch = 100;
  double hdddm_gamma = 1.0;

  std::uint64_t seed = 0;
};

struct StepRecord {
  TimeStep t = 0;
  int predicted = -1;
  bool queried = false;
  int delivered = 0;
  bool correct = false;
  double acc_preq = 0.0;
  bool drift = false;
  double budget = 0.0;
  double spent = 0.0;
};

struct RunTrace {
  std::vector<StepRecord> steps;
  std::vector<TimeStep> detections;
  long long n_queries = 0;
  long long evaluated = 0;
  long long n_correct = 0;
  long long dropped_deliveries = 0;
  long long duplicate_deliveries = 0;
  double accuracy = 0.0;  // prequential, init samples excluded
  double query_rate = 0.0;
};

// Test-then-train driver. Per-step phase order: deliver due labels (feeding
// the semi-supervised detectors), push the sample, predict and score BEFORE
// any training on it, unsupervised detector update, budget lookup, utility,
// query decision, model rebuild.
class Simulation {
 public:
  Simulation(const SimConfig& cfg, int n_classes)
      : cfg_(cfg),
        n_classes_(n_classes),
        window_(cfg.window),
        account_(1.0 / static_cast<double>(cfg.window)),
        split_(cfg.split_step, cfg.split_spread),
        pal_(cfg.window, cfg.pal_mc_draws),
        ddm_(cfg.ddm_warmup),
        adwin_(cfg.adwin_delta),
        hdddm_(cfg.hdddm_batch, cfg.hdddm_gamma),
        rng_(mix_seed(cfg.seed, 5)) {
    if (n_classes < 2) throw std::invalid_argument("Simulation: need >= 2 classes");
    if (cfg.budget < 0.0 || cfg.budget > 1.0) {
      throw std::invalid_argument("Simulation: budget must be in [0,1]");
    }
    if (cfg.dynamic_budget) {
      schedule_ = std::make_unique<BudgetSchedule>(cfg.budget, cfg.m_high, cfg.m_low,
                                                   cfg.adjust_span);
    }
  }

  void step(const StreamEvent& e) {
    if (seen_ < cfg_.init_samples) {
      init_step(e);
      return;
    }

    if (!model_) {  // init_samples == 0: start from an empty model
      bandwidth_ = cfg_.bandwidth > 0.0 ? cfg_.bandwidth : 1.0;
      model_ = std::make_unique<PwcModel>(
          window_model(window_, trains_on_propagated(), n_classes_, bandwidth_));
    }

    StepRecord rec;
    rec.t = e.t;

    // 1: due labels arrive, detectors see the realized errors
    bool drift_now = deliver(e.t, rec.delivered);

    // 2: blind window update
    window_.push(e);

    // 3: prequential prediction, scored before any training on this sample
    rec.predicted = model_->predict(e.x);
    rec.correct = rec.predicted == e.label;
    ++trace_.evaluated;
    trace_.n_correct += rec.correct;
    rec.acc_preq = static_cast<double>(trace_.n_correct) / static_cast<double>(trace_.evaluated);

    // 4: unsupervised detector runs on the raw sample
    if (cfg_.detector == DetectorKind::kHdddm) drift_now |= hdddm_.update(e.x);
    if (drift_now) {
      trace_.detections.push_back(e.t);
      if (schedule_) schedule_->on_drift(static_cast<double>(e.t));
    }
    rec.drift = drift_now;

    // 5: drift-dependent budget
    rec.budget = schedule_ ? schedule_->at(static_cast<double>(e.t)) : cfg_.budget;

    // 6: utility from the configured estimator (for PR this always sees the
    // propagated labels, whether or not they train the prediction model)
    const PwcModel estimator_model = build_utility_model();
    const double utility = 1.0 - estimator_model.confidence(e.x);

    // 7: query decision
    bool query = false;
    switch (cfg_.strategy) {
      case StrategyKind::kRandom:
        query = random_.decide(rec.budget, account_, rng_);
        break;
      case StrategyKind::kSplit:
        query = split_.decide(rec.budget, utility, account_, rng_);
        break;
      case StrategyKind::kPal:
        query = pal_.decide(rec.budget, estimator_model.class_kernel_mass(e.x), account_, rng_);
        break;
    }
    if (query) {
      const TimeStep due = oracle_.enqueue(e.t, e.label, cfg_.latency, rng_);
      window_.mark_pending(e.t, due);
      pending_predictions_[e.t] = rec.predicted;
      ++trace_.n_queries;
    }
    account_.record(query);
    rec.queried = query;
    rec.spent = account_.spent();

    // 8: rebuild for the next step; with persistent propagated labels the
    // utility model already is the training model
    if (trains_on_propagated()) {
      model_ = std::make_unique<PwcModel>(estimator_model);
    } else {
      model_ = std::make_unique<PwcModel>(
          window_model(window_, false, n_classes_, bandwidth_));
    }
    if (cfg_.deliver_same_step) {
      int late = 0;
      drift_now = deliver(e.t, late);
      rec.delivered += late;
      if (drift_now) {
        trace_.detections.push_back(e.t);
        if (schedule_) schedule_->on_drift(static_cast<double>(e.t));
        rec.drift = true;
      }
      if (late > 0) {
        model_ = std::make_unique<PwcModel>(
            window_model(window_, trains_on_propagated(), n_classes_, bandwidth_));
      }
    }

    trace_.steps.push_back(rec);
    ++seen_;
  }

  RunTrace finish() {
    trace_.dropped_deliveries = window_.dropped_deliveries();
    trace_.duplicate_deliveries = window_.duplicate_deliveries();
    trace_.accuracy = trace_.evaluated == 0
                          ? 0.0
                          : static_cast<double>(trace_.n_correct) /
                                static_cast<double>(trace_.evaluated);
    trace_.query_rate = trace_.steps.empty()
                            ? 0.0
                            : static_cast<double>(trace_.n_queries) /
                                  static_cast<double>(trace_.steps.size());
    return trace_;
  }

  const SlidingWindow& window() const { return window_; }
  const RunTrace& trace() const { return trace_; }
  double bandwidth() const { return bandwidth_; }
  std::size_t oracle_pending() const { return oracle_.pending_count(); }

 private:
  void init_step(const StreamEvent& e) {
    window_.push(e);
    window_.attach_label(e.t, e.label);
    if (cfg_.detector == DetectorKind::kHdddm) hdddm_.update(e.x);
    StepRecord rec;
    rec.t = e.t;
    trace_.steps.push_back(rec);
    ++seen_;
    if (seen_ == cfg_.init_samples) {
      if (cfg_.bandwidth > 0.0) {
        bandwidth_ = cfg_.bandwidth;
      } else {
        std::vector<std::vector<double>> points;
        points.reserve(window_.size());
        for (std::size_t i = 0; i < window_.size(); ++i) points.push_back(window_[i].event.x);
        bandwidth_ = default_bandwidth(points);
      }
      model_ = std::make_unique<PwcModel>(
          window_model(window_, trains_on_propagated(), n_classes_, bandwidth_));
    }
  }

  /// Attach everything due at `now`; returns whether an error-stream
  /// detector fired. Deliveries to evicted samples are discarded.
  bool deliver(TimeStep now, int& delivered) {
    bool fired = false;
    for (const Delivery& d : oracle_.deliver_due(now)) {
      ++delivered;
      const AttachResult res = window_.attach_label(d.t_query, d.label);
      const auto it = pending_predictions_.find(d.t_query);
      if (res == AttachResult::kAttached && it != pending_predictions_.end()) {
        const bool error = d.label != it->second;
        if (cfg_.detector == DetectorKind::kDdm) {
          fired |= ddm_.update(error) == DdmStatus::kDrift;
        } else if (cfg_.detector == DetectorKind::kAdwin) {
          fired |= adwin_.update(error ? 1.0 : 0.0);
        }
      }
      if (it != pending_predictions_.end()) pending_predictions_.erase(it);
    }
    return fired;
  }

  bool trains_on_propagated() const {
    return cfg_.estimator == EstimatorKind::kPropagate && cfg_.train_on_propagated;
  }

  PwcModel build_utility_model() {
    const bool propagate = cfg_.estimator == EstimatorKind::kPropagate;
    if (propagate) {
      window_.clear_propagated();
      propagate_pending(window_, cfg_.pr);
    }
    return window_model(window_, propagate, n_classes_, bandwidth_);
  }

  SimConfig cfg_;
  int n_classes_;
  SlidingWindow window_;
  LabelOracle oracle_;
  BudgetAccount account_;
  RandomStrategy random_;
  SplitStrategy split_;
  PalStrategy pal_;
  DdmDetector ddm_;
  AdwinDetector adwin_;
  HdddmDetector hdddm_;
  std::unique_ptr<BudgetSchedule> schedule_;
  std::unique_ptr<PwcModel> model_;
  std::unordered_map<TimeStep, int> pending_predictions_;
  Rng rng_;
  RunTrace trace_;
  int seen_ = 0;
  double bandwidth_ = 1.0;
};

/// Run the full prequential loop over a materialized stream.
inline RunTrace simulate(const std::vector<StreamEvent>& stream, const SimConfig& cfg) {
  int n_classes = 2;
  for (const auto& e : stream) n_classes = std::max(n_classes, e.label + 1);
  Simulation sim(cfg, n_classes);
  for (const auto& e : stream) sim.step(e);
  return sim.finish();
}

}  // namespace streamal
