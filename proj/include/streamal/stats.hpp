#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace streamal {

namespace detail {

/// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Regularized lower incomplete gamma P(a, x) by series expansion.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x) by continued fraction.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

/// Upper-tail chi-square probability with `dof` degrees of freedom.
inline double chi2_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  const double a = 0.5 * dof;
  const double hx = 0.5 * x;
  if (hx < a + 1.0) return 1.0 - gamma_p_series(a, hx);
  return gamma_q_cf(a, hx);
}

/// Midranks of `values` (1-based, ties share the average rank).
inline std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

struct MannWhitneyResult {
  double u = 0.0;  // U statistic of the first sample
  double p = 1.0;  // two-sided
  bool exact = false;
};

/// Mann-Whitney U test with midrank tie handling. Exact permutation
/// enumeration when min(n) <= 8, normal approximation with tie correction
/// and continuity correction otherwise.
inline MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;

  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = detail::midranks(pooled);

  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  const double u_obs = r1 - 0.5 * static_cast<double>(n1) * (n1 + 1);
  const double mu = 0.5 * static_cast<double>(n1) * static_cast<double>(n2);

  MannWhitneyResult res;
  res.u = u_obs;

  if (std::min(n1, n2) <= 8) {
    // Enumerate every assignment of n1 pooled values to the first sample and
    // count those at least as extreme as the observed |U - mu|.
    res.exact = true;
    const double dev_obs = std::fabs(u_obs - mu) - 1e-12;
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n1), true);
    long long extreme = 0, total = 0;
    do {
      double rsum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) rsum += ranks[i];
      }
      const double u = rsum - 0.5 * static_cast<double>(n1) * (n1 + 1);
      if (std::fabs(u - mu) >= dev_obs) ++extreme;
      ++total;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    res.p = static_cast<double>(extreme) / static_cast<double>(total);
    return res;
  }

  // Tie correction over groups of equal pooled values.
  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }
  const double nn = static_cast<double>(n);
  const double var = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                     (nn + 1.0 - tie_sum / (nn * (nn - 1.0)));
  if (var <= 0.0) {
    res.p = 1.0;
    return res;
  }
  const double z = std::max(0.0, std::fabs(u_obs - mu) - 0.5) / std::sqrt(var);
  res.p = std::min(1.0, 2.0 * (1.0 - detail::norm_cdf(z)));
  return res;
}

struct FriedmanResult {
  double chi2 = 0.0;
  double p = 1.0;
  std::vector<double> mean_ranks;       // one per algorithm, rank 1 = best
  double critical_difference = 0.0;     // Nemenyi CD at alpha = 0.05
};

/// Friedman test over a scores matrix (rows: algorithms, columns: datasets;
/// higher score = better), followed by the Nemenyi critical difference.
inline FriedmanResult friedman_nemenyi(
    const std::vector<std::vector<double>>& scores) {
  const std::size_t k = scores.size();
  if (k < 2) throw std::invalid_argument("friedman_nemenyi: need >= 2 algorithms");
  const std::size_t n_datasets = scores[0].size();
  if (n_datasets < 2) throw std::invalid_argument("friedman_nemenyi: need >= 2 datasets");
  for (const auto& row : scores) {
    if (row.size() != n_datasets) throw std::invalid_argument("friedman_nemenyi: ragged matrix");
  }

  FriedmanResult res;
  res.mean_ranks.assign(k, 0.0);
  for (std::size_t d = 0; d < n_datasets; ++d) {
    std::vector<double> col(k);
    for (std::size_t j = 0; j < k; ++j) col[j] = -scores[j][d];  // rank 1 = highest score
    const std::vector<double> ranks = detail::midranks(col);
    for (std::size_t j = 0; j < k; ++j) res.mean_ranks[j] += ranks[j];
  }
  for (double& r : res.mean_ranks) r /= static_cast<double>(n_datasets);

  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n_datasets);
  double sumsq = 0.0;
  for (double r : res.mean_ranks) sumsq += r * r;
  res.chi2 = 12.0 * nn / (kk * (kk + 1.0)) * (sumsq - kk * (kk + 1.0) * (kk + 1.0) / 4.0);
  if (res.chi2 < 0.0) res.chi2 = 0.0;  // guard fp noise in the all-tied case
  res.p = detail::chi2_sf(res.chi2, kk - 1.0);

  // Studentized-range-based q_{0.05} / sqrt(2) for k = 2..10 (Demsar 2006).
  static constexpr double kQ05[] = {0.0,   0.0,   1.960, 2.343, 2.569, 2.728,
                                    2.850, 2.949, 3.031, 3.102, 3.164};
  if (k >= sizeof(kQ05) / sizeof(kQ05[0])) {
    throw std::invalid_argument("friedman_nemenyi: q table covers k <= 10");
  }
  res.critical_difference = kQ05[k] * std::sqrt(kk * (kk + 1.0) / (6.0 * nn));
  return res;
}

struct DetectionRecord {
  std::optional<double> true_drift;    // absent: stream has no known drift
  std::vector<double> detections;      // detector firing times
  double window = 1000.0;              // acceptance window W
};

/// H-score: harmonic mean of detection precision and timeliness. A detection
/// matches if it falls in [drift, drift + W]; timeliness is 1 - delay/W for
/// the first matched detection.
inline double h_score(const DetectionRecord& rec) {
  if (rec.detections.empty()) return 0.0;
  if (!rec.true_drift) return 0.0;  // every detection is a false alarm
  const double drift = *rec.true_drift;
  std::size_t matched = 0;
  double first_delay = -1.0;
  for (double d : rec.detections) {
    if (d >= drift && d <= drift + rec.window) {
      ++matched;
      if (first_delay < 0.0) first_delay = d - drift;
    }
  }
  const double precision = static_cast<double>(matched) / static_cast<double>(rec.detections.size());
  const double timeliness = first_delay < 0.0 ? 0.0 : std::max(0.0, 1.0 - first_delay / rec.window);
  if (precision + timeliness == 0.0) return 0.0;
  return 2.0 * precision * timeliness / (precision + timeliness);
}

}  // namespace streamal
