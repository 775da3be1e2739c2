#pragma once

#include <algorithm>
#include <cmath>

#include "pdq/intensity.hpp"
#include "pdq/quadrature.hpp"
#include "pdq/state.hpp"

namespace pdq {

/// Integrated total hazard along the flow from s over [0, z]:
/// H(z) = int_0^z (arrival_rate + service_rate)(flow(s, u)) du.
inline double integrated_hazard(const IntensityField& f, const StateX& s,
                                double z) {
  return integrate_flow(f, s, z,
                        [&](double u) { return f.total_rate(flow(s, u)); });
}

/// Integrated hazard over a sub-window [a, b] of the same flow.
inline double integrated_hazard(const IntensityField& f, const StateX& s,
                                double a, double b) {
  if (!(b > a)) return 0.0;
  const StateX sa = flow(s, a);
  return integrated_hazard(f, sa, b - a);
}

/// Probability that no jump of either kind occurs within delta when flowing
/// from s: exp(-H(delta)).
inline double survival_probability(const IntensityField& f, const StateX& s,
                                   double delta) {
  if (!(delta > 0.0)) return 1.0;
  const double h = integrated_hazard(f, s, delta);
  return std::clamp(std::exp(-h), 0.0, 1.0);
}

/// Density of the first-event time at z along the flow from s:
/// (total hazard at flow(s, z)) * exp(-H(z)).
inline double event_density(const IntensityField& f, const StateX& s,
                            double z) {
  if (z < 0.0) return 0.0;
  return f.total_rate(flow(s, z)) * survival_probability(f, s, z);
}

/// First-event channel split at the moment of a jump: probability that the
/// jump is an arrival given it happens at state sz.
inline double arrival_share(const IntensityField& f, const StateX& sz) {
  const double lam = f.arrival_rate(sz);
  const double tot = lam + f.service_rate(sz);
  return tot > 0.0 ? lam / tot : 0.0;
}

}  // namespace pdq
