#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "streamal/generators.hpp"
#include "streamal/simulate.hpp"
#include "streamal/stats.hpp"

namespace streamal {

inline std::string to_string(StrategyKind s) {
  switch (s) {
    case StrategyKind::kRandom: return "random";
    case StrategyKind::kSplit: return "split";
    case StrategyKind::kPal: return "pal";
  }
  return "?";
}

inline std::string to_string(EstimatorKind e) {
  return e == EstimatorKind::kPropagate ? "pr" : "ignore_pending";
}

inline std::string to_string(DetectorKind d) {
  switch (d) {
    case DetectorKind::kNone: return "none";
    case DetectorKind::kDdm: return "ddm";
    case DetectorKind::kAdwin: return "adwin";
    case DetectorKind::kHdddm: return "hdddm";
  }
  return "?";
}

inline StrategyKind strategy_from_string(const std::string& s) {
  if (s == "random" || s == "rand") return StrategyKind::kRandom;
  if (s == "split") return StrategyKind::kSplit;
  if (s == "pal") return StrategyKind::kPal;
  throw std::invalid_argument("unknown strategy: " + s);
}

inline EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "pr" || s == "propagate") return EstimatorKind::kPropagate;
  if (s == "ignore_pending" || s == "ignore") return EstimatorKind::kIgnorePending;
  throw std::invalid_argument("unknown estimator: " + s);
}

inline DetectorKind detector_from_string(const std::string& s) {
  if (s == "none") return DetectorKind::kNone;
  if (s == "ddm") return DetectorKind::kDdm;
  if (s == "adwin") return DetectorKind::kAdwin;
  if (s == "hdddm") return DetectorKind::kHdddm;
  throw std::invalid_argument("unknown detector: " + s);
}

/// Stream reference: a synthetic preset name, or "csv:<path>:<label column>".
inline StreamSpec parse_stream_ref(const std::string& ref) {
  if (ref.rfind("csv:", 0) == 0) {
    const std::string rest = ref.substr(4);
    const auto sep = rest.rfind(':');
    if (sep == std::string::npos || sep == 0 || sep + 1 == rest.size()) {
      throw std::invalid_argument("csv stream ref must be csv:<path>:<label column>");
    }
    StreamSpec spec;
    spec.kind = StreamKind::kCsv;
    spec.path = rest.substr(0, sep);
    spec.label_column = rest.substr(sep + 1);
    return spec;
  }
  return stream_preset(ref);
}

// Grid configuration: the Cartesian product of all list-valued fields times
// the seed list defines the runs.
struct ExperimentConfig {
  std::vector<std::string> streams{"rbf_2_2"};
  std::vector<double> budgets{0.05};
  std::vector<double> delays{0.0};
  LatencyDistribution::Kind delay_kind = LatencyDistribution::Kind::kTruncatedNormal;
  std::vector<StrategyKind> strategies{StrategyKind::kSplit};
  std::vector<EstimatorKind> estimators{EstimatorKind::kPropagate};
  std::vector<DetectorKind> detectors{DetectorKind::kNone};

  bool dynamic_budget = false;
  double m_high = 4.0;
  double m_low = 0.5;
  double adjust_span = 1000.0;

  bool inject_drift = true;  // synthetic streams only
  double drift_position = 0.5;
  int drift_width = 100;
  int drift_features = 1;

  std::size_t window = 500;
  int init_samples = 100;
  PrConfig pr;
  bool deliver_same_step = false;
  std::vector<std::uint64_t> seeds{1};
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (streams.empty() || budgets.empty() || delays.empty() || strategies.empty() ||
        estimators.empty() || detectors.empty() || seeds.empty()) {
      throw std::invalid_argument("experiment grid has an empty dimension");
    }
    for (double b : budgets) {
      if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("budget must be in (0,1]");
    }
    for (double d : delays) {
      if (d < 0.0) throw std::invalid_argument("delay must be nonnegative");
    }
    if (dynamic_budget) {
      for (double b : budgets) {
        BudgetSchedule check(b, m_high, m_low, adjust_span);  // throws when invalid
        (void)check;
      }
    }
  }
};

struct RunSpec {
  std::string stream_ref;
  double budget = 0.0;
  double delay = 0.0;
  StrategyKind strategy = StrategyKind::kSplit;
  EstimatorKind estimator = EstimatorKind::kPropagate;
  DetectorKind detector = DetectorKind::kNone;
  std::uint64_t seed = 0;

  std::string id(bool dynamic) const {
    std::ostringstream os;
    os << stream_ref << "-b" << budget << "-d" << delay << '-' << to_string(strategy) << '-'
       << to_string(estimator) << '-' << to_string(detector) << (dynamic ? "-dyn" : "-static")
       << "-s" << seed;
    return os.str();
  }
};

struct RunResult {
  RunSpec spec;
  std::string run_id;
  RunTrace trace;
  std::optional<double> true_drift;  // injected drift onset, when known
  double h = 0.0;                    // H-score when true_drift is known
};

inline std::vector<RunSpec> expand_grid(const ExperimentConfig& cfg) {
  std::vector<RunSpec> runs;
  for (const auto& stream : cfg.streams)
    for (double b : cfg.budgets)
      for (double d : cfg.delays)
        for (auto strat : cfg.strategies)
          for (auto est : cfg.estimators)
            for (auto det : cfg.detectors)
              for (auto seed : cfg.seeds) {
                runs.push_back(RunSpec{stream, b, d, strat, est, det, seed});
              }
  return runs;
}

inline RunResult execute_run(const ExperimentConfig& cfg, const RunSpec& run) {
  StreamSpec sspec = parse_stream_ref(run.stream_ref);
  sspec.seed = run.seed;
  std::optional<double> true_drift;
  if (cfg.inject_drift && sspec.kind != StreamKind::kCsv) {
    sspec.drift = DriftSpec{cfg.drift_position, cfg.drift_width, cfg.drift_features};
    true_drift = std::floor(cfg.drift_position * sspec.n);
  }
  const std::vector<StreamEvent> stream = generate(sspec);

  SimConfig sim;
  sim.window = cfg.window;
  sim.init_samples = cfg.init_samples;
  sim.budget = run.budget;
  sim.latency = LatencyDistribution{cfg.delay_kind, run.delay};
  sim.strategy = run.strategy;
  sim.estimator = run.estimator;
  sim.detector = run.detector;
  sim.dynamic_budget = cfg.dynamic_budget;
  sim.m_high = cfg.m_high;
  sim.m_low = cfg.m_low;
  sim.adjust_span = cfg.adjust_span;
  sim.pr = cfg.pr;
  sim.deliver_same_step = cfg.deliver_same_step;
  sim.seed = run.seed;

  RunResult result;
  result.spec = run;
  result.run_id = run.id(cfg.dynamic_budget);
  result.trace = simulate(stream, sim);
  result.true_drift = true_drift;
  if (true_drift) {
    DetectionRecord rec;
    rec.true_drift = true_drift;
    rec.window = cfg.adjust_span;
    for (TimeStep t : result.trace.detections) rec.detections.push_back(static_cast<double>(t));
    result.h = h_score(rec);
  }
  return result;
}

/// Run the whole grid, work-stealing across runs. Result order matches
/// expand_grid regardless of scheduling.
inline std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<RunSpec> runs = expand_grid(cfg);
  std::vector<RunResult> results(runs.size());
  unsigned n_threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(runs.size()));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size() || failed.load()) return;
      try {
        results[i] = execute_run(cfg, runs[i]);
      } catch (const std::exception& ex) {
        std::scoped_lock lock(error_mutex);
        failed.store(true);
        if (error_message.empty()) error_message = ex.what();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("run failed: " + error_message);
  return results;
}

// ---------------------------------------------------------------------------
// Result emission. Files are written to a temp path and renamed into place.

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::string steps_csv(const std::vector<RunResult>& results) {
  std::ostringstream os;
  os << "run_id,seed,t,queried,n_delivered,correct,acc_preq,drift,budget,spent\n";
  for (const auto& r : results) {
    for (const auto& s : r.trace.steps) {
      os << r.run_id << ',' << r.spec.seed << ',' << s.t << ',' << (s.queried ? 1 : 0) << ','
         << s.delivered << ',' << (s.correct ? 1 : 0) << ',' << format_double(s.acc_preq) << ','
         << (s.drift ? 1 : 0) << ',' << format_double(s.budget) << ','
         << format_double(s.spent) << '\n';
    }
  }
  return os.str();
}

inline std::string summary_csv(const std::vector<RunResult>& results) {
  std::ostringstream os;
  os << "run_id,seed,stream,budget,delay,strategy,estimator,detector,"
        "acc_preq,n_queries,query_rate,n_detections,first_detection,h_score,"
        "dropped_deliveries\n";
  for (const auto& r : results) {
    os << r.run_id << ',' << r.spec.seed << ',' << r.spec.stream_ref << ','
       << format_double(r.spec.budget) << ',' << format_double(r.spec.delay) << ','
       << to_string(r.spec.strategy) << ',' << to_string(r.spec.estimator) << ','
       << to_string(r.spec.detector) << ',' << format_double(r.trace.accuracy) << ','
       << r.trace.n_queries << ',' << format_double(r.trace.query_rate) << ','
       << r.trace.detections.size() << ','
       << (r.trace.detections.empty() ? std::string("")
                                      : std::to_string(r.trace.detections.front()))
       << ',' << (r.true_drift ? format_double(r.h) : std::string("")) << ','
       << r.trace.dropped_deliveries << '\n';
  }
  return os.str();
}

inline void emit_results(const std::vector<RunResult>& results,
                         const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  atomic_write(out_dir / "steps.csv", steps_csv(results));
  atomic_write(out_dir / "summary.csv", summary_csv(results));
}

}  // namespace streamal
