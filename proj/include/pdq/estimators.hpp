#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdq/cycles.hpp"
#include "pdq/intensity.hpp"
#include "pdq/lyapunov.hpp"
#include "pdq/parallel.hpp"
#include "pdq/rng.hpp"
#include "pdq/simulate.hpp"
#include "pdq/stats.hpp"

namespace pdq {

class InsufficientCyclesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kMinCyclesForEstimate = 100;

/// Regenerative ratio estimator R = sum(numerator) / sum(length) with a
/// delta-method standard error from the per-cycle residuals
/// d_i = a_i - R l_i:  se = sd(d) / (mean(l) sqrt(ncycles)).
inline EstimateCI ratio_estimate(const std::vector<double>& nums,
                                 const std::vector<double>& dens) {
  const std::size_t n = nums.size();
  if (n != dens.size())
    throw std::invalid_argument("ratio_estimate: size mismatch");
  if (n < kMinCyclesForEstimate)
    throw InsufficientCyclesError(
        "ratio estimator needs at least " +
        std::to_string(kMinCyclesForEstimate) + " cycles, got " +
        std::to_string(n));
  const double a = stable_sum(nums);
  const double l = stable_sum(dens);
  if (!(l > 0.0))
    throw std::invalid_argument("ratio_estimate: non-positive denominator");
  const double r = a / l;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = nums[i] - r * dens[i];
    sq[i] = d * d;
  }
  const double var_d =
      stable_sum(std::move(sq)) / static_cast<double>(n - 1);
  const double lbar = l / static_cast<double>(n);
  const double se = std::sqrt(var_d / static_cast<double>(n)) / lbar;
  return {r, se, r - kNormalZ975 * se, r + kNormalZ975 * se, n};
}

/// Long-run fraction of time with exactly `level` customers present.
inline EstimateCI availability_factor(
    const std::vector<RegenerationCycle>& cycles, std::uint32_t level) {
  std::vector<double> nums(cycles.size()), dens(cycles.size());
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    nums[i] = cycles[i].occupancy_at(level);
    dens[i] = cycles[i].length;
  }
  return ratio_estimate(nums, dens);
}

/// Stationary mean of the functional registered at `index` during cycle
/// collection.
inline EstimateCI stationary_functional(
    const std::vector<RegenerationCycle>& cycles, std::size_t index) {
  std::vector<double> nums(cycles.size()), dens(cycles.size());
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (index >= cycles[i].integrals.size())
      throw std::invalid_argument("stationary_functional: bad index");
    nums[i] = cycles[i].integrals[index];
    dens[i] = cycles[i].length;
  }
  return ratio_estimate(nums, dens);
}

struct HittingRow {
  StateX start;
  EstimateCI tau_moment;      // mean of tau^k over uncensored replicas
  std::size_t censored = 0;
  std::size_t replicas = 0;
  double lyapunov_weight = 0.0;  // L_m(start)
  double ratio = 0.0;            // tau_moment / L_m(start)
};

struct HittingTable {
  int k = 1;
  int m = 2;
  double cap = 1e6;
  std::vector<HittingRow> rows;
  double censored_fraction_max = 0.0;
  bool censor_gate_ok = true;  // every row under 1% censored
};

constexpr double kCensoredFractionGate = 0.01;

/// Empirical k-th moment of the time to drain the queue, from each start
/// state, against the polynomial weight L_m(start). Finiteness of the moment
/// requires m > k; the constructor-level check is left to callers so the
/// experiment can also be used to watch the bound fail.
inline HittingTable hitting_moment_experiment(
    const IntensityField& f, const std::vector<StateX>& starts, int k, int m,
    std::size_t replicas, double cap, std::uint64_t master_seed,
    unsigned jobs = 1, SamplerKind sampler = SamplerKind::thinning) {
  HittingTable table;
  table.k = k;
  table.m = m;
  table.cap = cap;
  table.rows.resize(starts.size());
  for (std::size_t si = 0; si < starts.size(); ++si) {
    // Each start gets its own derived master so replica indices never
    // collide across rows.
    const std::uint64_t row_master =
        derive_stream_seed(master_seed, 0x48495454ULL + si);
    std::vector<double> moments(replicas);
    std::vector<std::uint8_t> censored(replicas, 0);
    parallel_tasks(replicas, jobs, [&](std::size_t r) {
      const auto res = hitting_time_tau0(
          f, starts[si], SeedSpec{row_master, static_cast<std::uint32_t>(r)},
          cap, sampler);
      censored[r] = res.censored ? 1 : 0;
      moments[r] = res.censored ? 0.0 : detail::ipow(res.tau, k);
    });
    std::vector<double> kept;
    kept.reserve(replicas);
    std::size_t ncens = 0;
    for (std::size_t r = 0; r < replicas; ++r) {
      if (censored[r]) {
        ++ncens;
      } else {
        kept.push_back(moments[r]);
      }
    }
    HittingRow& row = table.rows[si];
    row.start = starts[si];
    row.censored = ncens;
    row.replicas = replicas;
    row.tau_moment = mean_estimate(kept);
    row.lyapunov_weight = lyapunov_L(starts[si], m);
    row.ratio = row.tau_moment.value / row.lyapunov_weight;
    const double frac =
        static_cast<double>(ncens) / static_cast<double>(replicas);
    table.censored_fraction_max = std::max(table.censored_fraction_max, frac);
  }
  table.censor_gate_ok = table.censored_fraction_max <= kCensoredFractionGate;
  return table;
}

}  // namespace pdq
