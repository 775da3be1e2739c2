#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include "pdq/hazard.hpp"
#include "pdq/intensity.hpp"
#include "pdq/quadrature.hpp"
#include "pdq/rng.hpp"
#include "pdq/state.hpp"

namespace pdq {

enum class EventKind : std::uint8_t { arrival, service_end };

struct NextEvent {
  double dt = 0.0;
  EventKind kind = EventKind::arrival;
};

/// Raised when a sampler makes no progress (zero envelope, or an absurd
/// number of rejected proposals on an effectively null field).
class StallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kMaxProposals = 1'000'000'000;
constexpr double kInversionHorizon = 1e6;
constexpr double kInversionTimeTol = 1e-10;

/// Thinning against the constant envelope B = lambda_sup + h_sup: propose
/// Exp(B) steps, accept with probability total_rate/B at the flowed state,
/// then split the accepted jump between the two channels. Draw order per
/// proposal is fixed (waiting time, acceptance, then channel) so a stream
/// replays identically. Returns nullopt if no event occurs within max_dt.
inline std::optional<NextEvent> sample_next_thinning(
    const IntensityField& f, const StateX& s, RngStream& rng,
    double max_dt = std::numeric_limits<double>::infinity(),
    std::uint64_t max_proposals = kMaxProposals) {
  const double envelope = f.bound();
  if (!(envelope > 0.0)) {
    if (std::isfinite(max_dt)) return std::nullopt;
    throw StallError("thinning: zero intensity envelope on an open horizon");
  }
  double tau = 0.0;
  for (std::uint64_t i = 0; i < max_proposals; ++i) {
    tau += rng.exponential(envelope);
    if (!(tau <= max_dt)) return std::nullopt;
    if (std::isinf(tau))
      throw StallError("thinning: proposal time overflowed");
    const StateX su = flow(s, tau);
    const double lam = f.arrival_rate(su);
    const double mu = f.service_rate(su);
    const double accept = rng.uniform01() * envelope;
    if (accept < lam + mu) {
      const EventKind kind = rng.uniform01() * (lam + mu) < lam
                                 ? EventKind::arrival
                                 : EventKind::service_end;
      return NextEvent{tau, kind};
    }
  }
  throw StallError("thinning: proposal budget exhausted");
}

inline NextEvent next_event_thinning(const IntensityField& f, const StateX& s,
                                     RngStream& rng) {
  return *sample_next_thinning(f, s, rng);
}

struct InversionOptions {
  double horizon = kInversionHorizon;
  double time_tol = kInversionTimeTol;
};

/// Solves H(z) = -log(1 - u) for z, where H is the integrated total hazard
/// along the flow from s. Pure function of (f, s, u): the oracle half of the
/// inversion sampler. Returns nullopt if the root is not bracketed within
/// the horizon (a censored draw on a field whose hazard decays too fast).
inline std::optional<double> inversion_time(const IntensityField& f,
                                            const StateX& s, double u,
                                            InversionOptions opt = {}) {
  if (!(u > 0.0) || !(u < 1.0))
    throw std::invalid_argument("inversion_time: u must lie in (0,1)");
  const double target = -std::log1p(-u);

  // Expand a bracket, accumulating H at the left edge so each refinement
  // only integrates over the new sub-window.
  double lo = 0.0, h_lo = 0.0;
  double hi = std::min(1.0, opt.horizon);
  double h_hi = integrated_hazard(f, s, 0.0, hi);
  while (h_hi < target && hi < opt.horizon) {
    lo = hi;
    h_lo = h_hi;
    hi = std::min(hi * 2.0, opt.horizon);
    h_hi = h_lo + integrated_hazard(f, s, lo, hi);
  }
  if (h_hi < target) return std::nullopt;

  while (hi - lo > opt.time_tol) {
    const double mid = 0.5 * (lo + hi);
    const double h_mid = h_lo + integrated_hazard(f, s, lo, mid);
    if (h_mid < target) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Inversion sampler: one uniform for the event time through inversion_time,
/// one for the channel split at the flowed state. Returns nullopt when the
/// event falls beyond max_dt or is censored at the horizon.
inline std::optional<NextEvent> sample_next_inversion(
    const IntensityField& f, const StateX& s, RngStream& rng,
    double max_dt = std::numeric_limits<double>::infinity(),
    InversionOptions opt = {}) {
  const double u = rng.uniform01();
  const auto z = inversion_time(f, s, u, opt);
  if (!z || !(*z <= max_dt)) return std::nullopt;
  const StateX su = flow(s, *z);
  const double lam = f.arrival_rate(su);
  const double tot = lam + f.service_rate(su);
  if (!(tot > 0.0)) return std::nullopt;  // vanishing density; unreachable u
  const EventKind kind = rng.uniform01() * tot < lam ? EventKind::arrival
                                                     : EventKind::service_end;
  return NextEvent{*z, kind};
}

inline std::optional<NextEvent> next_event_inversion(const IntensityField& f,
                                                     const StateX& s,
                                                     RngStream& rng) {
  return sample_next_inversion(f, s, rng);
}

/// Competing-risks construction: the arrival and service channels are
/// sampled as two independent first-event times (each by thinning against
/// its own envelope) and the earlier one wins. Distributionally equivalent
/// to the single-hazard samplers; kept as a cross-check.
inline std::optional<NextEvent> sample_next_two_streams(
    const IntensityField& f, const StateX& s, RngStream& rng,
    double max_dt = std::numeric_limits<double>::infinity(),
    std::uint64_t max_proposals = kMaxProposals) {
  const auto first_time = [&](double envelope, auto&& rate) -> double {
    if (!(envelope > 0.0)) return std::numeric_limits<double>::infinity();
    double tau = 0.0;
    for (std::uint64_t i = 0; i < max_proposals; ++i) {
      tau += rng.exponential(envelope);
      if (!(tau <= max_dt) || std::isinf(tau))
        return std::numeric_limits<double>::infinity();
      if (rng.uniform01() * envelope < rate(flow(s, tau))) return tau;
    }
    throw StallError("two-stream thinning: proposal budget exhausted");
  };
  const double t_up = first_time(
      f.lambda_sup(), [&](const StateX& su) { return f.arrival_rate(su); });
  const double t_down = first_time(
      f.h_sup(), [&](const StateX& su) { return f.service_rate(su); });
  if (std::isinf(t_up) && std::isinf(t_down)) {
    if (std::isfinite(max_dt)) return std::nullopt;
    throw StallError("two-stream thinning: no channel produced an event");
  }
  if (t_up <= t_down) return NextEvent{t_up, EventKind::arrival};
  return NextEvent{t_down, EventKind::service_end};
}

}  // namespace pdq
