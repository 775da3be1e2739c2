#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "pdq/intensity.hpp"
#include "pdq/lyapunov.hpp"
#include "pdq/state.hpp"

namespace pdq {

/// Scalar test function f(X) with partial derivatives in the two clocks.
/// The n coordinate only changes through jumps, so no derivative in n is
/// needed: the extended generator is
///   G f(X) = 1(n>0) df/dx + df/dy
///          + arrival_rate(X)  (f(X+) - f(X))
///          + service_rate(X)  (f(X-) - f(X)).
struct TestFunction {
  std::string name;
  std::function<double(const StateX&)> value;
  std::function<double(const StateX&)> dx;
  std::function<double(const StateX&)> dy;

  static TestFunction constant(double c) {
    return {"const", [c](const StateX&) { return c; },
            [](const StateX&) { return 0.0; },
            [](const StateX&) { return 0.0; }};
  }

  /// f(X) = x + y, pure transport.
  static TestFunction coordinate_sum() {
    return {"x+y", [](const StateX& s) { return s.x + s.y; },
            [](const StateX&) { return 1.0; },
            [](const StateX&) { return 1.0; }};
  }

  /// f(X) = (n + 1 + x + y)^m with exact partials.
  static TestFunction lyapunov(int m) {
    return {"L" + std::to_string(m),
            [m](const StateX& s) { return lyapunov_L(s, m); },
            [m](const StateX& s) {
              return m * detail::ipow(lyapunov_base(s), m - 1);
            },
            [m](const StateX& s) {
              return m * detail::ipow(lyapunov_base(s), m - 1);
            }};
  }

  /// Smooth truncation cap * tanh(L_m / cap): bounded, of the same growth as
  /// L_m where L_m << cap, with exact chain-rule partials.
  static TestFunction lyapunov_capped(int m, double cap = 1e3) {
    const auto tprime = [cap](double v) {
      const double c = std::cosh(v / cap);
      return 1.0 / (c * c);
    };
    return {"capped L" + std::to_string(m),
            [m, cap](const StateX& s) {
              return cap * std::tanh(lyapunov_L(s, m) / cap);
            },
            [m, cap, tprime](const StateX& s) {
              return tprime(lyapunov_L(s, m)) * m *
                     detail::ipow(lyapunov_base(s), m - 1);
            },
            [m, cap, tprime](const StateX& s) {
              return tprime(lyapunov_L(s, m)) * m *
                     detail::ipow(lyapunov_base(s), m - 1);
            }};
  }

  /// Wraps a plain value function with central finite-difference partials
  /// (one-sided at the x >= 0 boundary).
  static TestFunction with_numeric_partials(
      std::string name, std::function<double(const StateX&)> v,
      double step = 1e-6) {
    auto dx = [v, step](const StateX& s) {
      if (s.x < step) {
        const StateX hi{s.n, s.x + step, s.y};
        return (v(hi) - v(s)) / step;
      }
      const StateX hi{s.n, s.x + step, s.y};
      const StateX lo{s.n, s.x - step, s.y};
      return (v(hi) - v(lo)) / (2.0 * step);
    };
    auto dy = [v, step](const StateX& s) {
      if (s.y < step) {
        const StateX hi{s.n, s.x, s.y + step};
        return (v(hi) - v(s)) / step;
      }
      const StateX hi{s.n, s.x, s.y + step};
      const StateX lo{s.n, s.x, s.y - step};
      return (v(hi) - v(lo)) / (2.0 * step);
    };
    return {std::move(name), std::move(v), std::move(dx), std::move(dy)};
  }
};

inline double generator_apply(const IntensityField& f, const StateX& s,
                              const TestFunction& fn) {
  const double v = fn.value(s);
  double g = fn.dy(s);
  if (s.n > 0) g += fn.dx(s);
  g += f.arrival_rate(s) * (fn.value(jump_up(s)) - v);
  g += f.service_rate(s) * (fn.value(jump_down(s)) - v);
  return g;
}

/// Time-dependent test function phi(t, X); the generator gains a d/dt term.
struct TimeTestFunction {
  std::string name;
  std::function<double(double, const StateX&)> value;
  std::function<double(double, const StateX&)> dt;
  std::function<double(double, const StateX&)> dx;
  std::function<double(double, const StateX&)> dy;

  /// phi(t, X) = (1 + t)^k * cap * tanh(L_m / cap), exact partials.
  static TimeTestFunction lyapunov_capped(int k, int m, double cap = 1e3) {
    const auto wt = [k](double t) { return detail::ipow(1.0 + t, k); };
    const auto capped = [cap](const StateX& s, int mm) {
      return cap * std::tanh(lyapunov_L(s, mm) / cap);
    };
    const auto capped_d = [cap](const StateX& s, int mm) {
      const double c = std::cosh(lyapunov_L(s, mm) / cap);
      return (1.0 / (c * c)) * mm * detail::ipow(lyapunov_base(s), mm - 1);
    };
    return {"(1+t)^" + std::to_string(k) + " cap tanh L" + std::to_string(m),
            [wt, capped, m](double t, const StateX& s) {
              return wt(t) * capped(s, m);
            },
            [k, capped, m](double t, const StateX& s) {
              return k * detail::ipow(1.0 + t, k - 1) * capped(s, m);
            },
            [wt, capped_d, m](double t, const StateX& s) {
              return wt(t) * capped_d(s, m);
            },
            [wt, capped_d, m](double t, const StateX& s) {
              return wt(t) * capped_d(s, m);
            }};
  }

  static TimeTestFunction constant(double c) {
    return {"const", [c](double, const StateX&) { return c; },
            [](double, const StateX&) { return 0.0; },
            [](double, const StateX&) { return 0.0; },
            [](double, const StateX&) { return 0.0; }};
  }
};

inline double generator_apply_time(const IntensityField& f, double t,
                                   const StateX& s,
                                   const TimeTestFunction& fn) {
  const double v = fn.value(t, s);
  double g = fn.dt(t, s) + fn.dy(t, s);
  if (s.n > 0) g += fn.dx(t, s);
  g += f.arrival_rate(s) * (fn.value(t, jump_up(s)) - v);
  g += f.service_rate(s) * (fn.value(t, jump_down(s)) - v);
  return g;
}

}  // namespace pdq
