#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "pdq/expr.hpp"

namespace pdq {

/// Stationary queue-length law of M/M/1: pi(m) = (1 - rho) rho^m.
inline double mm1_stationary_pmf(double lambda, double mu, std::uint32_t m) {
  const double rho = lambda / mu;
  if (!(rho < 1.0)) throw std::invalid_argument("mm1: requires rho < 1");
  return (1.0 - rho) * std::pow(rho, static_cast<double>(m));
}

inline double mm1_mean_number(double lambda, double mu) {
  const double rho = lambda / mu;
  if (!(rho < 1.0)) throw std::invalid_argument("mm1: requires rho < 1");
  return rho / (1.0 - rho);
}

/// Mean busy period of M/M/1 started by a single customer.
inline double mm1_busy_period_mean(double lambda, double mu) {
  if (!(mu > lambda)) throw std::invalid_argument("mm1: requires mu > lambda");
  return 1.0 / (mu - lambda);
}

/// Mean stationary number in system for M/G/1 with utilization rho and
/// squared coefficient of variation of the service law:
/// rho + rho^2 (1 + scv) / (2 (1 - rho)).
inline double mg1_mean_number(double rho, double scv) {
  if (!(rho < 1.0)) throw std::invalid_argument("mg1: requires rho < 1");
  return rho + rho * rho * (1.0 + scv) / (2.0 * (1.0 - rho));
}

/// Service-time families specified through their hazard rate in the elapsed
/// service clock x, used to drive the queue as an M/G/1 system.
struct ServiceLaw {
  enum class Family : std::uint8_t { exponential, erlang2, pareto_hazard };

  Family family = Family::exponential;
  double param = 1.0;

  static ServiceLaw exponential(double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("exponential: mu > 0");
    return {Family::exponential, mu};
  }

  /// Erlang(2, nu): density nu^2 x e^(-nu x), hazard nu^2 x / (1 + nu x).
  static ServiceLaw erlang2(double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("erlang2: nu > 0");
    return {Family::erlang2, nu};
  }

  /// Pareto-type tail via the hazard c0/(1+x): survival (1+x)^(-c0).
  static ServiceLaw pareto_hazard(double c0) {
    if (!(c0 > 0.0)) throw std::invalid_argument("pareto: c0 > 0");
    return {Family::pareto_hazard, c0};
  }

  std::string hazard_expr() const {
    switch (family) {
      case Family::exponential: return detail::format_number(param);
      case Family::erlang2:
        return detail::format_number(param * param) + "*x/(1+" +
               detail::format_number(param) + "*x)";
      case Family::pareto_hazard:
        return detail::format_number(param) + "/(1+x)";
    }
    return "0";
  }

  double hazard(double x) const {
    switch (family) {
      case Family::exponential: return param;
      case Family::erlang2:
        return param * param * x / (1.0 + param * x);
      case Family::pareto_hazard: return param / (1.0 + x);
    }
    return 0.0;
  }

  double survival(double x) const {
    if (x <= 0.0) return 1.0;
    switch (family) {
      case Family::exponential: return std::exp(-param * x);
      case Family::erlang2:
        return (1.0 + param * x) * std::exp(-param * x);
      case Family::pareto_hazard: return std::pow(1.0 + x, -param);
    }
    return 1.0;
  }

  double mean() const {
    switch (family) {
      case Family::exponential: return 1.0 / param;
      case Family::erlang2: return 2.0 / param;
      case Family::pareto_hazard:
        if (!(param > 1.0))
          throw std::invalid_argument("pareto: mean requires c0 > 1");
        return 1.0 / (param - 1.0);
    }
    return 0.0;
  }

  /// Squared coefficient of variation; infinite-variance laws throw.
  double scv() const {
    switch (family) {
      case Family::exponential: return 1.0;
      case Family::erlang2: return 0.5;
      case Family::pareto_hazard:
        if (!(param > 2.0))
          throw std::invalid_argument("pareto: scv requires c0 > 2");
        return param / (param - 2.0);
    }
    return 0.0;
  }
};

}  // namespace pdq
