#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdq/intensity.hpp"
#include "pdq/parallel.hpp"
#include "pdq/quadrature.hpp"
#include "pdq/rng.hpp"
#include "pdq/simulate.hpp"
#include "pdq/state.hpp"

namespace pdq {

/// Raised when a regeneration cycle exceeds its length cap: the usual cause
/// is an unstable load (the queue never drains).
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A path functional accumulated as int g(X_t) dt over each cycle. When
/// `constant_between_jumps` is set the value depends on n only, so segment
/// integrals are exact products; otherwise a Gauss-Legendre panel is used
/// per flow segment (exact for polynomials in the clocks).
struct CycleFunctional {
  std::string name;
  std::function<double(const StateX&)> eval;
  bool constant_between_jumps = false;

  static CycleFunctional indicator(std::uint32_t level) {
    return {"1(n=" + std::to_string(level) + ")",
            [level](const StateX& s) { return s.n == level ? 1.0 : 0.0; },
            true};
  }

  static CycleFunctional number_in_system() {
    return {"n", [](const StateX& s) { return static_cast<double>(s.n); },
            true};
  }

  static CycleFunctional of(std::string name,
                            std::function<double(const StateX&)> g) {
    return {std::move(name), std::move(g), false};
  }
};

/// One regeneration cycle: the span between consecutive arrivals into an
/// empty system. The chain restarts from (1, 0, 0) at each boundary, so
/// cycles are independent and identically distributed.
struct RegenerationCycle {
  double length = 0.0;
  std::vector<double> occupancy;  // time spent at each queue length
  std::vector<double> integrals;  // one per registered functional
  StateX sample_state;            // state at a uniform random time in the cycle

  double occupancy_at(std::uint32_t level) const {
    return level < occupancy.size() ? occupancy[level] : 0.0;
  }
};

struct CycleOptions {
  double max_cycle_length = 1e6;
  SamplerKind sampler = SamplerKind::thinning;
};

/// Simulates `num` cycles on one stream after discarding `warmup` cycles.
/// The regeneration state (1,0,0) is entered exactly at each boundary, so no
/// residual bias survives the warmup. An auxiliary stream drives the
/// uniform-time state sample (reservoir over segments) without perturbing
/// the path draws.
inline std::vector<RegenerationCycle> collect_cycles(
    const IntensityField& f, std::size_t warmup, std::size_t num,
    const std::vector<CycleFunctional>& functionals, SeedSpec seed,
    const CycleOptions& opt = {}) {
  std::vector<RegenerationCycle> out;
  out.reserve(num);
  PathStepper stepper(f, {1, 0.0, 0.0}, seed, opt.sampler);
  RngStream aux(seed.master_seed, stream_ns::kAux + seed.replica_index);

  RegenerationCycle cur;
  cur.integrals.assign(functionals.size(), 0.0);
  double cycle_start = 0.0;
  double prev_t = 0.0;
  StateX prev_s{1, 0.0, 0.0};
  std::size_t done = 0;

  while (out.size() < num) {
    const auto evt = stepper.step(cycle_start + opt.max_cycle_length);
    if (!evt)
      throw InstabilityError(
          "regeneration cycle exceeded its length cap; the load is likely "
          "unstable");
    const double seg = evt->t - prev_t;
    if (seg > 0.0) {
      if (prev_s.n >= cur.occupancy.size())
        cur.occupancy.resize(prev_s.n + 1, 0.0);
      cur.occupancy[prev_s.n] += seg;
      for (std::size_t j = 0; j < functionals.size(); ++j) {
        const auto& fn = functionals[j];
        cur.integrals[j] +=
            fn.constant_between_jumps
                ? fn.eval(prev_s) * seg
                : integrate_gl16(
                      [&](double u) { return fn.eval(flow(prev_s, u)); }, 0.0,
                      seg);
      }
      // Reservoir for a uniform time point across the growing cycle.
      const double before = prev_t - cycle_start;
      if (aux.uniform01() < seg / (before + seg))
        cur.sample_state = flow(prev_s, aux.uniform01() * seg);
    }

    const bool boundary =
        evt->kind == EventKind::arrival && prev_s.n == 0;
    if (boundary) {
      cur.length = evt->t - cycle_start;
      if (done >= warmup) out.push_back(std::move(cur));
      ++done;
      cur = RegenerationCycle{};
      cur.integrals.assign(functionals.size(), 0.0);
      cycle_start = evt->t;
    }
    prev_t = evt->t;
    prev_s = evt->state_after;
  }
  return out;
}

namespace detail {

inline std::size_t cycle_shard_count(std::size_t num) {
  const std::size_t by_size = num / 512;
  return std::max<std::size_t>(1, std::min<std::size_t>(by_size, 256));
}

}  // namespace detail

/// Sharded cycle collection: work is split over fixed logical shards, each
/// with its own derived stream, so the concatenated output is identical for
/// every job count.
inline std::vector<RegenerationCycle> collect_cycles_parallel(
    const IntensityField& f, std::size_t warmup, std::size_t num,
    const std::vector<CycleFunctional>& functionals, std::uint64_t master_seed,
    unsigned jobs, const CycleOptions& opt = {}) {
  const std::size_t shards = detail::cycle_shard_count(num);
  std::vector<std::vector<RegenerationCycle>> parts(shards);
  parallel_tasks(shards, jobs, [&](std::size_t i) {
    const std::size_t quota = num / shards + (i < num % shards ? 1 : 0);
    parts[i] = collect_cycles(
        f, warmup, quota, functionals,
        SeedSpec{master_seed, static_cast<std::uint32_t>(i)}, opt);
  });
  std::vector<RegenerationCycle> all;
  all.reserve(num);
  for (auto& p : parts)
    for (auto& c : p) all.push_back(std::move(c));
  return all;
}

}  // namespace pdq
