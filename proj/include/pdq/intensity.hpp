#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "pdq/expr.hpp"
#include "pdq/state.hpp"

namespace pdq {

/// Intensity model of the queue: state-dependent arrival rate lambda(n,x,y)
/// for busy states, service-completion rate h(n,x,y), and the idle arrival
/// rate lambda0(y). Carries declared uniform upper bounds used both as the
/// thinning envelope and as a validated boundedness contract.
class IntensityField {
 public:
  IntensityField(IntensityExpr lambda, IntensityExpr h, IntensityExpr lambda0,
                 double lambda_sup, double h_sup)
      : lambda_(std::move(lambda)),
        h_(std::move(h)),
        lambda0_(std::move(lambda0)),
        lambda_sup_(lambda_sup),
        h_sup_(h_sup) {
    if (!(lambda_sup_ >= 0.0) || !(h_sup_ >= 0.0))
      throw std::invalid_argument("intensity bounds must be non-negative");
  }

  static IntensityField parse(const std::string& lambda, const std::string& h,
                              const std::string& lambda0, double lambda_sup,
                              double h_sup) {
    return IntensityField(parse_intensity(lambda), parse_intensity(h),
                          parse_intensity(lambda0), lambda_sup, h_sup);
  }

  /// Arrival intensity at s: lambda0(y) when idle, lambda(n,x,y) otherwise.
  double arrival_rate(const StateX& s) const {
    return s.n == 0 ? lambda0_(s) : lambda_(s);
  }

  /// Service-completion intensity; identically zero when idle.
  double service_rate(const StateX& s) const {
    return s.n == 0 ? 0.0 : h_(s);
  }

  double total_rate(const StateX& s) const {
    return arrival_rate(s) + service_rate(s);
  }

  /// Global thinning envelope for the total jump intensity.
  double bound() const { return lambda_sup_ + h_sup_; }

  double lambda_sup() const { return lambda_sup_; }
  double h_sup() const { return h_sup_; }

  const IntensityExpr& lambda() const { return lambda_; }
  const IntensityExpr& h() const { return h_; }
  const IntensityExpr& lambda0() const { return lambda0_; }

 private:
  IntensityExpr lambda_;
  IntensityExpr h_;
  IntensityExpr lambda0_;
  double lambda_sup_;
  double h_sup_;
};

inline double total_hazard(const IntensityField& f, const StateX& s) {
  return f.total_rate(s);
}

}  // namespace pdq
