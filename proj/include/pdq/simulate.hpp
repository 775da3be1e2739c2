#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "pdq/intensity.hpp"
#include "pdq/rng.hpp"
#include "pdq/sampler.hpp"
#include "pdq/state.hpp"
#include "pdq/trajectory.hpp"

namespace pdq {

enum class SamplerKind : std::uint8_t { thinning, inversion };

inline SamplerKind sampler_from_name(const std::string& name) {
  if (name == "thinning") return SamplerKind::thinning;
  if (name == "inversion") return SamplerKind::inversion;
  throw std::invalid_argument("unknown sampler '" + name + "'");
}

inline const char* sampler_name(SamplerKind k) {
  return k == SamplerKind::thinning ? "thinning" : "inversion";
}

/// Incremental path generator: one random stream, one current state, events
/// pulled on demand up to caller-chosen time fences. The law of the path
/// does not depend on the fence pattern (both samplers restart correctly
/// from a flowed state), but the realized draws do, so replays must use the
/// same fence sequence.
class PathStepper {
 public:
  PathStepper(const IntensityField& f, StateX s0, SeedSpec seed,
              SamplerKind sampler = SamplerKind::thinning)
      : field_(f), state_(s0), rng_(seed), sampler_(sampler) {}

  double time() const { return t_; }
  const StateX& state() const { return state_; }

  /// Advances to the next jump if it occurs at or before max_t; otherwise
  /// advances the clock (and the state, along the flow) to max_t exactly and
  /// returns nullopt.
  std::optional<PathEvent> step(double max_t) {
    if (max_t < t_) throw std::invalid_argument("step: fence behind clock");
    const double window = max_t - t_;
    std::optional<NextEvent> next;
    if (sampler_ == SamplerKind::thinning) {
      next = sample_next_thinning(field_, state_, rng_, window);
    } else {
      next = sample_next_inversion(field_, state_, rng_, window);
    }
    if (!next) {
      state_ = flow(state_, window);
      t_ = max_t;
      return std::nullopt;
    }
    const StateX at_jump = flow(state_, next->dt);
    state_ = next->kind == EventKind::arrival ? jump_up(at_jump)
                                              : jump_down(at_jump);
    t_ += next->dt;
    return PathEvent{t_, next->kind, state_};
  }

 private:
  const IntensityField& field_;
  StateX state_;
  double t_ = 0.0;
  RngStream rng_;
  SamplerKind sampler_;
};

/// Full path on [0, horizon] for one replica stream.
inline Trajectory simulate_path(const IntensityField& f, StateX s0,
                                double horizon, SeedSpec seed,
                                SamplerKind sampler = SamplerKind::thinning) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("simulate_path: horizon must be finite");
  Trajectory traj;
  traj.initial = s0;
  traj.horizon = horizon;
  PathStepper stepper(f, s0, seed, sampler);
  while (auto e = stepper.step(horizon)) traj.events.push_back(*e);
  return traj;
}

struct HittingResult {
  double tau = 0.0;
  bool censored = false;
};

/// First time the system empties, starting from s0; censored at time cap.
inline HittingResult hitting_time_tau0(const IntensityField& f, StateX s0,
                                       SeedSpec seed, double cap = 1e6,
                                       SamplerKind sampler =
                                           SamplerKind::thinning) {
  if (s0.n == 0) return {0.0, false};
  PathStepper stepper(f, s0, seed, sampler);
  while (true) {
    auto e = stepper.step(cap);
    if (!e) return {cap, true};
    if (e->state_after.n == 0) return {e->t, false};
  }
}

}  // namespace pdq
