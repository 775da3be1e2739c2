#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pdq/cycles.hpp"
#include "pdq/rng.hpp"
#include "pdq/stats.hpp"

namespace pdq {

/// Probability mass over queue lengths 0, 1, 2, ...; indices past the end
/// carry zero mass, so histograms of different lengths compare directly.
using Histogram = std::vector<double>;

inline double total_variation(const Histogram& p, const Histogram& q) {
  const std::size_t n = std::max(p.size(), q.size());
  std::vector<double> gaps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = i < p.size() ? p[i] : 0.0;
    const double qi = i < q.size() ? q[i] : 0.0;
    gaps[i] = std::fabs(pi - qi);
  }
  return 0.5 * stable_sum(std::move(gaps));
}

inline Histogram normalize_histogram(Histogram h) {
  for (double v : h)
    if (!(v >= 0.0)) throw std::invalid_argument("negative histogram mass");
  std::vector<double> mass(h.begin(), h.end());
  const double total = stable_sum(std::move(mass));
  if (!(total > 0.0)) throw std::invalid_argument("histogram has no mass");
  for (double& v : h) v /= total;
  return h;
}

/// Time-weighted queue-length distribution over a set of cycles. Ratios of
/// cycle sums estimate the stationary law, so no per-cycle normalization.
inline Histogram occupancy_histogram(
    const std::vector<RegenerationCycle>& cycles) {
  std::size_t levels = 0;
  for (const auto& c : cycles) levels = std::max(levels, c.occupancy.size());
  if (levels == 0) throw std::invalid_argument("no occupancy data");
  Histogram h(levels, 0.0);
  for (const auto& c : cycles)
    for (std::size_t i = 0; i < c.occupancy.size(); ++i)
      h[i] += c.occupancy[i];
  return normalize_histogram(std::move(h));
}

namespace detail {

inline std::vector<double> cumulative_mass(const Histogram& pmf) {
  std::vector<double> cdf(pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    cdf[i] = acc;
  }
  if (!cdf.empty()) cdf.back() = std::max(cdf.back(), 1.0);
  return cdf;
}

inline std::size_t categorical_draw(const std::vector<double>& cdf,
                                    double u) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return it == cdf.end() ? cdf.size() - 1
                         : static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace detail

/// Empirical pmf of `n` independent draws from `pmf`.
inline Histogram multinomial_pmf_draw(const Histogram& pmf, std::size_t n,
                                      RngStream& rng) {
  if (n == 0) throw std::invalid_argument("need at least one draw");
  const auto cdf = detail::cumulative_mass(pmf);
  Histogram counts(pmf.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    counts[detail::categorical_draw(cdf, rng.uniform01())] += 1.0;
  for (double& c : counts) c /= static_cast<double>(n);
  return counts;
}

/// Sampling-noise level of a TV estimate against `reference` built from
/// `n_samples` draws: the TV distance is biased away from zero even for
/// samples from the reference itself, and this quantifies that floor.
struct NoiseFloor {
  double mean = 0.0;
  double sd = 0.0;
  double q999 = 0.0;
};

inline NoiseFloor bootstrap_noise_floor(const Histogram& reference,
                                        std::size_t n_samples,
                                        std::size_t reps,
                                        std::uint64_t master_seed,
                                        std::uint64_t stream_index) {
  if (reps < 2) throw std::invalid_argument("need at least two replicates");
  RngStream rng(master_seed, stream_index);
  std::vector<double> tvs(reps);
  for (std::size_t r = 0; r < reps; ++r)
    tvs[r] =
        total_variation(multinomial_pmf_draw(reference, n_samples, rng),
                        reference);
  NoiseFloor out;
  const auto m = mean_estimate(tvs);
  out.mean = m.value;
  out.sd = std::sqrt(sample_variance(tvs));
  std::sort(tvs.begin(), tvs.end());
  const std::size_t idx = std::min<std::size_t>(
      reps - 1, static_cast<std::size_t>(std::ceil(0.999 * reps)) - 1);
  out.q999 = tvs[idx];
  return out;
}

/// Bootstrap standard error of tv(empirical, reference) where `empirical`
/// came from `n_samples` draws: resample from the empirical law itself.
inline double bootstrap_tv_se(const Histogram& empirical,
                              const Histogram& reference,
                              std::size_t n_samples, std::size_t reps,
                              std::uint64_t master_seed,
                              std::uint64_t stream_index) {
  if (reps < 2) throw std::invalid_argument("need at least two replicates");
  RngStream rng(master_seed, stream_index);
  std::vector<double> tvs(reps);
  for (std::size_t r = 0; r < reps; ++r)
    tvs[r] =
        total_variation(multinomial_pmf_draw(empirical, n_samples, rng),
                        reference);
  return std::sqrt(sample_variance(tvs));
}

}  // namespace pdq
