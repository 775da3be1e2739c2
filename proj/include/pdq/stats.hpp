#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pdq {

// Two-sided 97.5% normal quantile, for 95% confidence intervals.
constexpr double kNormalZ975 = 1.959963984540054;

/// Point estimate with a standard error and a 95% normal interval.
struct EstimateCI {
  double value = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_samples = 0;
};

/// Sum after sorting ascending: bit-identical for any input ordering, so
/// estimators are invariant under cycle/replica reordering.
inline double stable_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

inline EstimateCI mean_estimate(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("mean_estimate: no samples");
  const double mean = stable_sum(samples) / static_cast<double>(n);
  double se = 0.0;
  if (n > 1) {
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = samples[i] - mean;
      sq[i] = d * d;
    }
    const double var = stable_sum(std::move(sq)) / static_cast<double>(n - 1);
    se = std::sqrt(var / static_cast<double>(n));
  }
  return {mean, se, mean - kNormalZ975 * se, mean + kNormalZ975 * se, n};
}

inline double sample_variance(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 2) return 0.0;
  const double mean = stable_sum(samples) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = samples[i] - mean;
    sq[i] = d * d;
  }
  return stable_sum(std::move(sq)) / static_cast<double>(n - 1);
}

inline double lag1_autocorrelation(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 3) return 0.0;
  const double mean = stable_sum(v) / static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i] - mean;
    den += d * d;
    if (i + 1 < n) num += d * (v[i + 1] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

/// Two-sample Kolmogorov-Smirnov statistic sup_t |F_a(t) - F_b(t)|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

/// Large-sample two-sample KS critical value at level alpha:
/// c(alpha) * sqrt((n + m) / (n m)), c(alpha) = sqrt(-ln(alpha/2) / 2).
inline double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

/// One-sample KS statistic against a CDF given as a callable.
template <typename Cdf>
inline double ks_one_sample(std::vector<double> a, Cdf cdf) {
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
  }
  return d;
}

inline double ks_one_sample_critical(double alpha, std::size_t n) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c / std::sqrt(static_cast<double>(n));
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& xs,
                               const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2)
    throw std::invalid_argument("least_squares: need >= 2 paired points");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate x");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace pdq
