#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "streamal/rng.hpp"
#include "streamal/stream.hpp"

namespace streamal {

enum class StreamKind { kRbf, kHyperplane, kStagger, kCsv };

/// Controlled drift: from floor(position * n) onward the most informative
/// `n_features` features are decoupled from the label, with corruption
/// probability ramping linearly from 0 to 1 over `width` samples.
struct DriftSpec {
  double position = 0.5;
  int width = 1;
  int n_features = 1;
};

struct StreamSpec {
  StreamKind kind = StreamKind::kRbf;
  int n = 4000;
  int dim = 2;
  int n_classes = 2;
  std::uint64_t seed = 0;
  std::optional<DriftSpec> drift;
  int centroids_per_class = 3;  // RBF only
  std::string path;             // CSV only
  std::string label_column;     // CSV only

  void validate() const {
    if (n <= 0) throw std::invalid_argument("stream length must be positive");
    if (dim < 1) throw std::invalid_argument("feature dimension must be >= 1");
    if (n_classes < 2) throw std::invalid_argument("need >= 2 classes");
    if (drift) {
      if (!(drift->position > 0.0 && drift->position < 1.0)) {
        throw std::invalid_argument("drift position must be in (0,1)");
      }
      if (drift->width < 1) throw std::invalid_argument("drift width must be >= 1");
      if (drift->n_features > dim) {
        throw std::invalid_argument("cannot corrupt more features than the stream has");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// RBF streams: per class a fixed set of Gaussian centroids drawn once from
// the seed; the label sequence is exactly balanced and shuffled.

struct RbfParams {
  std::vector<std::vector<double>> centers;  // centroids_per_class per class
  std::vector<double> stddev;
  std::vector<int> center_class;
};

/// Centroid placement interleaves class bands along every coordinate
/// (A B A B ... with a seeded cyclic shift per coordinate). Every coordinate
/// is then individually informative with several decision boundaries, so the
/// stream stays learnable for every seed, including after the most
/// informative features are corrupted, while still demanding coverage of all
/// the blobs.
inline RbfParams make_rbf_params(int dim, int n_classes, int per_class, Rng& rng) {
  constexpr double kBandMargin = 0.25;  // centroid stays in the middle half of its band

  std::vector<int> shift(static_cast<std::size_t>(dim));
  for (int& s : shift) s = static_cast<int>(rng.index(static_cast<std::size_t>(n_classes)));

  const int n_bands = n_classes * per_class;
  const double width = 2.0 / static_cast<double>(n_bands);
  RbfParams p;
  for (int c = 0; c < n_classes; ++c) {
    for (int m = 0; m < per_class; ++m) {
      std::vector<double> center(static_cast<std::size_t>(dim));
      for (int f = 0; f < dim; ++f) {
        const int band = m * n_classes + (c + shift[static_cast<std::size_t>(f)]) % n_classes;
        center[static_cast<std::size_t>(f)] =
            -1.0 + width * (static_cast<double>(band) + kBandMargin +
                            (1.0 - 2.0 * kBandMargin) * rng.uniform());
      }
      p.centers.push_back(std::move(center));
      p.stddev.push_back(width * rng.uniform(0.12, 0.18));
      p.center_class.push_back(c);
    }
  }
  return p;
}

inline std::vector<int> balanced_labels(int n, int n_classes, Rng& rng) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % n_classes;
  for (std::size_t i = labels.size(); i > 1; --i) {  // Fisher-Yates
    std::swap(labels[i - 1], labels[rng.index(i)]);
  }
  return labels;
}

inline std::vector<StreamEvent> gen_rbf(const StreamSpec& spec) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, 1));
  const RbfParams params =
      make_rbf_params(spec.dim, spec.n_classes, spec.centroids_per_class, rng);
  const std::vector<int> labels = balanced_labels(spec.n, spec.n_classes, rng);

  std::vector<StreamEvent> stream(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    // pick one of this class's centroids uniformly
    const auto pick = static_cast<std::size_t>(y) * static_cast<std::size_t>(spec.centroids_per_class) +
                      rng.index(static_cast<std::size_t>(spec.centroids_per_class));
    std::vector<double> x(static_cast<std::size_t>(spec.dim));
    for (int f = 0; f < spec.dim; ++f) {
      x[static_cast<std::size_t>(f)] =
          params.centers[pick][static_cast<std::size_t>(f)] + params.stddev[pick] * rng.normal();
    }
    stream[static_cast<std::size_t>(i)] = StreamEvent{i + 1, std::move(x), y};
  }
  return stream;
}

// ---------------------------------------------------------------------------
// Hyperplane streams: points uniform in the unit cube, class 1 on the
// positive side of a random hyperplane through the cube center.

struct HyperplaneParams {
  std::vector<double> weights;
  double threshold = 0.0;
};

inline HyperplaneParams make_hyperplane_params(int dim, Rng& rng) {
  HyperplaneParams p;
  p.weights.resize(static_cast<std::size_t>(dim));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& w : p.weights) {
      w = rng.uniform(-1.0, 1.0);
      norm += w * w;
    }
  } while (norm < 1e-6);
  p.threshold = 0.5 * std::accumulate(p.weights.begin(), p.weights.end(), 0.0);
  return p;
}

inline int hyperplane_label(const HyperplaneParams& p, const std::vector<double>& x) {
  double dot = 0.0;
  for (std::size_t i = 0; i < p.weights.size(); ++i) dot += p.weights[i] * x[i];
  return dot > p.threshold ? 1 : 0;
}

inline std::vector<StreamEvent> gen_hyperplane(const StreamSpec& spec) {
  spec.validate();
  if (spec.n_classes != 2) throw std::invalid_argument("hyperplane streams are binary");
  Rng rng(mix_seed(spec.seed, 2));
  const HyperplaneParams params = make_hyperplane_params(spec.dim, rng);
  std::vector<StreamEvent> stream(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    std::vector<double> x(static_cast<std::size_t>(spec.dim));
    for (double& v : x) v = rng.uniform();
    const int y = hyperplane_label(params, x);
    stream[static_cast<std::size_t>(i)] = StreamEvent{i + 1, std::move(x), y};
  }
  return stream;
}

// ---------------------------------------------------------------------------
// STAGGER streams. The three categorical attributes (size, color, shape,
// each in {0,1,2}) are compressed into 2 numeric coordinates, with a small
// jitter so samples do not collapse onto 27 exact points. Concept:
// color = green OR shape = circular.

inline bool stagger_rule(int size, int color, int shape) {
  (void)size;
  return color == 1 || shape == 1;
}

inline std::array<double, 2> stagger_encode(int size, int color, int shape) {
  return {static_cast<double>(size * 3 + color) / 8.0, static_cast<double>(shape) / 2.0};
}

inline std::vector<StreamEvent> gen_stagger(const StreamSpec& spec) {
  spec.validate();
  if (spec.dim != 2 || spec.n_classes != 2) {
    throw std::invalid_argument("stagger preset is 2 features, 2 classes");
  }
  Rng rng(mix_seed(spec.seed, 3));
  std::vector<StreamEvent> stream(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const int size = static_cast<int>(rng.index(3));
    const int color = static_cast<int>(rng.index(3));
    const int shape = static_cast<int>(rng.index(3));
    const auto enc = stagger_encode(size, color, shape);
    std::vector<double> x{enc[0] + 0.02 * rng.normal(), enc[1] + 0.02 * rng.normal()};
    stream[static_cast<std::size_t>(i)] =
        StreamEvent{i + 1, std::move(x), stagger_rule(size, color, shape) ? 1 : 0};
  }
  return stream;
}

// ---------------------------------------------------------------------------
// Drift injection.

/// Mutual information (nats) between a real feature and the labels, with
/// equal-frequency binning of the feature.
inline double mutual_information(const std::vector<double>& values,
                                 const std::vector<int>& labels, int bins = 10) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;  // upper edges of all but the last bin
  for (int b = 1; b < bins; ++b) {
    edges.push_back(sorted[n * static_cast<std::size_t>(b) / static_cast<std::size_t>(bins)]);
  }
  auto bin_of = [&](double v) {
    return static_cast<std::size_t>(
        std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
  };
  const int n_classes = 1 + *std::max_element(labels.begin(), labels.end());
  std::vector<double> joint(static_cast<std::size_t>(bins) * static_cast<std::size_t>(n_classes), 0.0);
  std::vector<double> pb(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> pc(static_cast<std::size_t>(n_classes), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = bin_of(values[i]);
    const auto c = static_cast<std::size_t>(labels[i]);
    joint[b * static_cast<std::size_t>(n_classes) + c] += 1.0;
    pb[b] += 1.0;
    pc[c] += 1.0;
  }
  double mi = 0.0;
  const double dn = static_cast<double>(n);
  for (std::size_t b = 0; b < static_cast<std::size_t>(bins); ++b) {
    for (std::size_t c = 0; c < static_cast<std::size_t>(n_classes); ++c) {
      const double j = joint[b * static_cast<std::size_t>(n_classes) + c];
      if (j > 0.0) mi += (j / dn) * std::log(j * dn / (pb[b] * pc[c]));
    }
  }
  return std::max(0.0, mi);
}

/// Rank features by mutual information with the label, descending.
inline std::vector<std::size_t> rank_features_by_mi(const std::vector<StreamEvent>& stream,
                                                    std::size_t upto) {
  const std::size_t dim = stream.front().x.size();
  std::vector<int> labels;
  labels.reserve(upto);
  for (std::size_t i = 0; i < upto; ++i) labels.push_back(stream[i].label);
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t f = 0; f < dim; ++f) {
    std::vector<double> values;
    values.reserve(upto);
    for (std::size_t i = 0; i < upto; ++i) values.push_back(stream[i].x[f]);
    scored.emplace_back(-mutual_information(values, labels), f);
  }
  std::stable_sort(scored.begin(), scored.end());
  std::vector<std::size_t> order;
  for (const auto& [neg_mi, f] : scored) order.push_back(f);
  return order;
}

namespace detail {

/// Fold q into [0,1] by reflection at the boundaries.
inline double reflect_unit(double q) {
  q = std::fmod(std::fabs(q), 2.0);
  return q > 1.0 ? 2.0 - q : q;
}

}  // namespace detail

// Corruption sweep geometry. Replacement values come from the feature's own
// sorted value pool through a quantile window that cycles deterministically
// across the whole range: over any full sweep the occupation of quantiles is
// uniform, so the long-run marginal is preserved, while individual batches
// concentrate in a narrow moving band that feature-space detectors can see.
inline constexpr double kCorruptionSweepPeriod = 1000.0;  // samples per cycle
inline constexpr double kCorruptionSliceWidth = 0.05;     // quantile units

/// Corrupt the most informative features from floor(position*n) onward:
/// values are replaced (with probability ramping linearly from 0 to 1 over
/// `width` samples) by draws from the feature's own marginal, taken through
/// the cyclic quantile window above. The feature-label association is
/// destroyed; the marginal over the corrupted half matches the original.
/// Samples before the drift point are untouched.
inline void inject_gradual_drift(std::vector<StreamEvent>& stream, const DriftSpec& drift,
                                 std::uint64_t seed) {
  const std::size_t n = stream.size();
  if (n == 0) return;
  const std::size_t dim = stream.front().x.size();
  if (static_cast<std::size_t>(drift.n_features) > dim) {
    throw std::invalid_argument("cannot corrupt more features than the stream has");
  }
  const auto start = static_cast<std::size_t>(drift.position * static_cast<double>(n));
  const std::vector<std::size_t> order = rank_features_by_mi(stream, start);
  const std::vector<std::size_t> victims(order.begin(),
                                         order.begin() + drift.n_features);

  // sorted marginal pools per corrupted feature, from the untouched stream
  std::vector<std::vector<double>> pools(victims.size());
  std::vector<double> phases(victims.size());
  Rng rng(mix_seed(seed, 4));
  for (std::size_t v = 0; v < victims.size(); ++v) {
    pools[v].reserve(n);
    for (const auto& e : stream) pools[v].push_back(e.x[victims[v]]);
    std::sort(pools[v].begin(), pools[v].end());
    phases[v] = rng.uniform();
  }

  for (std::size_t i = start; i < n; ++i) {
    const double strength =
        std::min(1.0, static_cast<double>(i - start + 1) / static_cast<double>(drift.width));
    const double progress = 2.0 * static_cast<double>(i - start) / kCorruptionSweepPeriod;
    for (std::size_t v = 0; v < victims.size(); ++v) {
      if (rng.uniform() < strength) {
        const double center = detail::reflect_unit(phases[v] + progress);
        const double q = detail::reflect_unit(center + kCorruptionSliceWidth * rng.normal());
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(n - 1) + 0.5);
        stream[i].x[victims[v]] = pools[v][std::min(idx, n - 1)];
      }
    }
  }
}

// ---------------------------------------------------------------------------
// CSV ingestion. Comma-separated, header row required, label column by name,
// all other columns numeric. Features are z-scored with a full offline pass.

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::vector<StreamEvent> load_csv_stream(const std::string& path,
                                                const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stream file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty stream file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) label_idx = i;
  }
  if (label_idx == header.size()) {
    throw std::runtime_error("unknown label column '" + label_column + "' in " + path);
  }

  std::vector<StreamEvent> stream;
  std::map<std::string, int> class_ids;  // class index by first appearance
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path + ": row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    }
    StreamEvent e;
    e.t = static_cast<TimeStep>(stream.size()) + 1;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == label_idx) {
        auto [it, unused] = class_ids.try_emplace(cells[i], static_cast<int>(class_ids.size()));
        e.label = it->second;
        continue;
      }
      try {
        std::size_t pos = 0;
        const double v = std::stod(cells[i], &pos);
        if (pos != cells[i].size()) throw std::invalid_argument("trailing junk");
        e.x.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": non-numeric cell at row " + std::to_string(row) +
                                 ", column '" + header[i] + "'");
      }
    }
    stream.push_back(std::move(e));
  }
  if (stream.empty()) throw std::runtime_error("no data rows in " + path);

  // full-pass z-score standardization
  const std::size_t dim = stream.front().x.size();
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const auto& e : stream) {
    for (std::size_t f = 0; f < dim; ++f) mean[f] += e.x[f];
  }
  for (double& m : mean) m /= static_cast<double>(stream.size());
  for (const auto& e : stream) {
    for (std::size_t f = 0; f < dim; ++f) {
      const double d = e.x[f] - mean[f];
      var[f] += d * d;
    }
  }
  for (double& v : var) v = std::sqrt(v / static_cast<double>(stream.size()));
  for (auto& e : stream) {
    for (std::size_t f = 0; f < dim; ++f) {
      e.x[f] = var[f] > 0.0 ? (e.x[f] - mean[f]) / var[f] : 0.0;
    }
  }
  return stream;
}

// ---------------------------------------------------------------------------

/// Generate (or load) the stream described by `spec`, applying drift
/// injection when requested. Fully determined by (spec, seed).
inline std::vector<StreamEvent> generate(const StreamSpec& spec) {
  spec.validate();
  std::vector<StreamEvent> stream;
  switch (spec.kind) {
    case StreamKind::kRbf: stream = gen_rbf(spec); break;
    case StreamKind::kHyperplane: stream = gen_hyperplane(spec); break;
    case StreamKind::kStagger: stream = gen_stagger(spec); break;
    case StreamKind::kCsv: stream = load_csv_stream(spec.path, spec.label_column); break;
  }
  if (spec.drift) inject_gradual_drift(stream, *spec.drift, spec.seed);
  return stream;
}

/// Named presets matching the synthetic benchmark streams.
inline StreamSpec stream_preset(std::string_view name) {
  StreamSpec spec;
  if (name == "rbf_2_2") {
    spec.kind = StreamKind::kRbf;
    spec.n = 4000; spec.dim = 2; spec.n_classes = 2;
  } else if (name == "rbf_10_4") {
    spec.kind = StreamKind::kRbf;
    spec.n = 4000; spec.dim = 10; spec.n_classes = 4;
  } else if (name == "hyperplane") {
    spec.kind = StreamKind::kHyperplane;
    spec.n = 4000; spec.dim = 2; spec.n_classes = 2;
  } else if (name == "stagger") {
    spec.kind = StreamKind::kStagger;
    spec.n = 4000; spec.dim = 2; spec.n_classes = 2;
  } else {
    throw std::invalid_argument("unknown stream preset: " + std::string(name));
  }
  return spec;
}

}  // namespace streamal
