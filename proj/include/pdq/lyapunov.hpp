#pragma once

#include "pdq/state.hpp"

namespace pdq {

namespace detail {

// Integer power by repeated multiplication; deterministic across platforms.
inline double ipow(double base, int exponent) {
  double r = 1.0;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

}  // namespace detail

inline double lyapunov_base(const StateX& s) { return s.n + 1.0 + s.x + s.y; }

/// L_m(X) = (n + 1 + x + y)^m for integer m >= 1.
inline double lyapunov_L(const StateX& s, int m) {
  return detail::ipow(lyapunov_base(s), m);
}

/// Time-weighted variant L_{k,m}(t, X) = (1 + t)^k * L_m(X).
inline double lyapunov_Lkm(double t, const StateX& s, int k, int m) {
  return detail::ipow(1.0 + t, k) * lyapunov_L(s, m);
}

}  // namespace pdq
