#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdq/cycles.hpp"
#include "pdq/intensity.hpp"
#include "pdq/parallel.hpp"
#include "pdq/rng.hpp"
#include "pdq/simulate.hpp"
#include "pdq/state.hpp"
#include "pdq/stats.hpp"
#include "pdq/tv.hpp"

namespace pdq {

/// Measures how fast the queue-length law from a chosen start approaches
/// the long-run law, in total variation over a time grid. The long-run law
/// comes from a separate regenerative run; starts can be a fixed state or
/// draws from that run's time-stationary pool.
enum class StartMode { fixed, stationary_pool };

struct ConvergenceOptions {
  std::size_t reference_cycles = 300000;
  std::size_t warmup_cycles = 100;
  std::size_t floor_reps = 1000;  // replicates for the sampling-noise floor
  std::size_t se_reps = 200;      // replicates for per-point tv errors
  SamplerKind sampler = SamplerKind::thinning;
  unsigned jobs = 1;
  double floor_margin = 0.003;  // tolerance band above the floor's q999
};

struct ConvergencePoint {
  double t = 0.0;
  double tv = 0.0;
  double tv_se = 0.0;
  bool usable = false;          // far enough above the floor to carry signal
  bool at_noise_floor = false;  // indistinguishable from stationarity
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  Histogram reference;
  NoiseFloor floor;
  LinearFit fit;  // log(tv - floor mean) against log(1 + t), usable points
  std::size_t usable_points = 0;
  std::size_t replicas = 0;
  std::string note;
};

/// Thrown when a fixed-start run leaves fewer than two grid points above
/// the noise floor, so no decay rate can be fit.
class UninformativeGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ConvergenceResult convergence_experiment(
    const IntensityField& f, StartMode mode, StateX start,
    const std::vector<double>& grid, std::size_t replicas,
    std::uint64_t master_seed, const ConvergenceOptions& opt = {}) {
  if (grid.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double prev = g == 0 ? 0.0 : grid[g - 1];
    if (!(grid[g] > prev))
      throw std::invalid_argument("grid times must be positive, increasing");
  }
  if (replicas < 2) throw std::invalid_argument("need at least 2 replicas");
  if (mode == StartMode::fixed && !is_valid_state(start))
    throw std::invalid_argument("invalid start state");

  const std::uint64_t ref_master =
      derive_stream_seed(master_seed, stream_ns::kReference);
  const auto ref_cycles = collect_cycles_parallel(
      f, opt.warmup_cycles, opt.reference_cycles, {}, ref_master, opt.jobs,
      CycleOptions{1e6, opt.sampler});
  Histogram reference = occupancy_histogram(ref_cycles);

  // Start states are drawn up front on a dedicated stream, so replica paths
  // and their seeds never depend on the start mode's consumption pattern.
  std::vector<StateX> starts(replicas, start);
  if (mode == StartMode::stationary_pool) {
    std::vector<double> cum(ref_cycles.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < ref_cycles.size(); ++i) {
      acc += ref_cycles[i].length;
      cum[i] = acc;
    }
    RngStream pool(master_seed, stream_ns::kPool);
    for (std::size_t r = 0; r < replicas; ++r) {
      const double target = pool.uniform01() * acc;
      const auto it = std::lower_bound(cum.begin(), cum.end(), target);
      const std::size_t idx =
          it == cum.end() ? cum.size() - 1
                          : static_cast<std::size_t>(it - cum.begin());
      starts[r] = ref_cycles[idx].sample_state;
    }
  }

  // One path per replica, observed at every grid time in order. Points on
  // the curve therefore share paths: each is unbiased, and comparisons
  // across points use the bootstrap errors below.
  const std::size_t n_grid = grid.size();
  std::vector<std::uint16_t> counts_matrix(replicas * n_grid, 0);
  parallel_tasks(replicas, opt.jobs, [&](std::size_t r) {
    PathStepper stepper(f, starts[r],
                        SeedSpec{master_seed, static_cast<std::uint32_t>(r)},
                        opt.sampler);
    for (std::size_t g = 0; g < n_grid; ++g) {
      while (stepper.time() < grid[g]) stepper.step(grid[g]);
      counts_matrix[r * n_grid + g] = static_cast<std::uint16_t>(
          std::min<std::uint32_t>(stepper.state().n, 65535u));
    }
  });

  ConvergenceResult out;
  out.reference = std::move(reference);
  out.replicas = replicas;
  out.floor = bootstrap_noise_floor(out.reference, replicas, opt.floor_reps,
                                    master_seed, stream_ns::kBootstrap);
  out.points.resize(n_grid);
  std::vector<double> fit_x, fit_y;
  for (std::size_t g = 0; g < n_grid; ++g) {
    std::uint16_t max_n = 0;
    for (std::size_t r = 0; r < replicas; ++r)
      max_n = std::max(max_n, counts_matrix[r * n_grid + g]);
    Histogram emp(static_cast<std::size_t>(max_n) + 1, 0.0);
    for (std::size_t r = 0; r < replicas; ++r)
      emp[counts_matrix[r * n_grid + g]] += 1.0;
    for (double& v : emp) v /= static_cast<double>(replicas);

    ConvergencePoint& pt = out.points[g];
    pt.t = grid[g];
    pt.tv = total_variation(emp, out.reference);
    pt.tv_se =
        bootstrap_tv_se(emp, out.reference, replicas, opt.se_reps,
                        master_seed, stream_ns::kBootstrap + 1 + g);
    const double excess = pt.tv - out.floor.mean;
    pt.usable =
        excess >= std::max(3.0 * out.floor.sd, 0.5 * out.floor.mean);
    pt.at_noise_floor = pt.tv <= out.floor.q999 + opt.floor_margin;
    if (pt.usable) {
      fit_x.push_back(std::log1p(pt.t));
      fit_y.push_back(std::log(excess));
    }
  }
  out.usable_points = fit_x.size();
  if (out.usable_points >= 2) {
    out.fit = least_squares(fit_x, fit_y);
  } else if (mode == StartMode::fixed) {
    throw UninformativeGridError(
        "fewer than two grid points rise above the sampling-noise floor");
  }
  out.note =
      "log-log fit identifies the decay order only; multiplicative "
      "constants are absorbed by the intercept and are not estimated";
  return out;
}

}  // namespace pdq
