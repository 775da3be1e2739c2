#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pdq/expr.hpp"
#include "pdq/intensity.hpp"
#include "pdq/state.hpp"

namespace pdq {

/// Evaluation lattice for condition checks: queue lengths 0..n_max crossed
/// with a clock axis that is dense near 0 (where hazards vary fastest) and
/// geometrically spaced out to t_max.
struct GridSpec {
  std::uint32_t n_max = 50;
  double t_max = 100.0;
  double step0 = 0.01;
  double growth = 1.2;

  std::vector<double> axis() const {
    std::vector<double> pts;
    pts.push_back(0.0);
    double step = step0;
    double t = 0.0;
    while (t < t_max) {
      t = std::min(t + step, t_max);
      pts.push_back(t);
      step *= growth;
    }
    return pts;
  }

  std::string describe() const {
    return "n in 0.." + std::to_string(n_max) + ", clocks 0.." +
           std::to_string(t_max) + " geometric from " + std::to_string(step0) +
           " (factor " + std::to_string(growth) + ")";
  }
};

/// Outcome of validating an intensity field against its declared bounds and
/// the drift/irreducibility conditions, evaluated on a finite grid.
struct ConditionReport {
  // Declared sups dominate the observed values of lambda, lambda0, h.
  bool boundedness_ok = false;
  double lambda_sup_observed = 0.0;
  double lambda0_sup_observed = 0.0;
  double h_sup_observed = 0.0;

  // Largest constant c0 with h(n,x,y) >= c0 / (1 + x) on the busy grid.
  double c0_estimate = 0.0;

  // Idle arrival rate bounded away from 0 and infinity.
  bool idle_rate_ok = false;
  double lambda0_inf_observed = std::numeric_limits<double>::infinity();

  // Optional sharper idle decay constant: min over y of lambda0(y) * (1 + y).
  double idle_c0_prime = 0.0;

  std::string grid;
  std::vector<std::string> violations;

  bool all_ok() const {
    return boundedness_ok && idle_rate_ok && c0_estimate > 0.0 &&
           violations.empty();
  }
};

/// Scans the grid, recording observed extrema of the three intensities and
/// checking the declared bounds. Evaluation errors become violations rather
/// than exceptions so the report can carry them to the caller.
inline ConditionReport validate_conditions(const IntensityField& f,
                                           const GridSpec& grid = {}) {
  ConditionReport rep;
  rep.grid = grid.describe();
  const std::vector<double> axis = grid.axis();

  double lam_max = 0.0, h_max = 0.0;
  double c0 = std::numeric_limits<double>::infinity();
  bool eval_failed = false;
  for (std::uint32_t n = 1; n <= grid.n_max && !eval_failed; ++n) {
    for (double x : axis) {
      for (double y : axis) {
        const StateX s{n, x, y};
        try {
          const double lam = f.arrival_rate(s);
          const double hz = f.service_rate(s);
          lam_max = std::max(lam_max, lam);
          h_max = std::max(h_max, hz);
          c0 = std::min(c0, hz * (1.0 + x));
        } catch (const EvalError& e) {
          rep.violations.push_back(e.what());
          eval_failed = true;
          break;
        }
      }
      if (eval_failed) break;
    }
  }

  double lam0_min = std::numeric_limits<double>::infinity();
  double lam0_max = 0.0;
  double c0p = std::numeric_limits<double>::infinity();
  for (double y : axis) {
    const StateX s{0, 0.0, y};
    try {
      const double l0 = f.arrival_rate(s);
      lam0_min = std::min(lam0_min, l0);
      lam0_max = std::max(lam0_max, l0);
      c0p = std::min(c0p, l0 * (1.0 + y));
    } catch (const EvalError& e) {
      rep.violations.push_back(e.what());
      eval_failed = true;
      break;
    }
  }

  rep.lambda_sup_observed = lam_max;
  rep.lambda0_sup_observed = lam0_max;
  rep.h_sup_observed = h_max;
  rep.c0_estimate = std::isfinite(c0) ? c0 : 0.0;
  rep.lambda0_inf_observed = lam0_min;
  rep.idle_c0_prime = std::isfinite(c0p) ? c0p : 0.0;

  const double slack = 1e-9;
  const bool lam_ok = lam_max <= f.lambda_sup() * (1.0 + slack) + 1e-12;
  const bool lam0_ok = lam0_max <= f.lambda_sup() * (1.0 + slack) + 1e-12;
  const bool h_ok = h_max <= f.h_sup() * (1.0 + slack) + 1e-12;
  if (!lam_ok)
    rep.violations.push_back("lambda exceeds its declared bound on the grid");
  if (!lam0_ok)
    rep.violations.push_back("lambda0 exceeds the declared arrival bound");
  if (!h_ok)
    rep.violations.push_back("h exceeds its declared bound on the grid");
  rep.boundedness_ok = lam_ok && lam0_ok && h_ok && !eval_failed;

  rep.idle_rate_ok = lam0_min > 0.0 && std::isfinite(lam0_max);
  if (!rep.idle_rate_ok)
    rep.violations.push_back(
        "idle arrival rate is not bounded away from 0 and infinity");
  if (!(rep.c0_estimate > 0.0))
    rep.violations.push_back(
        "service hazard lower bound c0 is zero on the grid");

  return rep;
}

}  // namespace pdq
