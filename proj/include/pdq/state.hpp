#pragma once

#include <cmath>
#include <cstdint>

namespace pdq {

/// Full state of the queue: number in system `n`, elapsed service time `x`
/// of the customer currently at the server, and elapsed time `y` since the
/// arrival clock was last reset. An idle system always carries x == 0.
struct StateX {
  std::uint32_t n = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const StateX&, const StateX&) = default;
};

inline bool is_valid_state(const StateX& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) && s.x >= 0.0 &&
         s.y >= 0.0 && (s.n > 0 || s.x == 0.0);
}

/// Arrival jump: one more customer, service clock kept, arrival clock reset.
inline StateX jump_up(const StateX& s) { return {s.n + 1, s.x, 0.0}; }

/// Service-completion jump: one fewer customer (floored at zero), service
/// clock reset, arrival clock kept.
inline StateX jump_down(const StateX& s) {
  return {s.n > 0 ? s.n - 1 : 0, 0.0, s.y};
}

/// Deterministic drift between jumps: both clocks advance at unit rate, the
/// service clock only while a customer is in service.
inline StateX flow(const StateX& s, double dt) {
  return {s.n, s.n > 0 ? s.x + dt : s.x, s.y + dt};
}

}  // namespace pdq
