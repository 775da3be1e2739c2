#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdq/sampler.hpp"
#include "pdq/state.hpp"

namespace pdq {

struct PathEvent {
  double t = 0.0;
  EventKind kind = EventKind::arrival;
  StateX state_after;

  friend bool operator==(const PathEvent&, const PathEvent&) = default;
};

inline const char* event_kind_name(EventKind k) {
  return k == EventKind::arrival ? "arrival" : "service_end";
}

/// A simulated path on [0, horizon]: the initial state plus the ordered jump
/// record. States between jumps follow the deterministic flow.
struct Trajectory {
  StateX initial;
  double horizon = 0.0;
  std::vector<PathEvent> events;

  /// State at an arbitrary time in [0, horizon].
  StateX state_at(double t) const {
    if (t < 0.0 || t > horizon)
      throw std::out_of_range("state_at: time outside [0, horizon]");
    // Last event at or before t.
    auto it = std::upper_bound(
        events.begin(), events.end(), t,
        [](double tt, const PathEvent& e) { return tt < e.t; });
    if (it == events.begin()) return flow(initial, t);
    const PathEvent& e = *(it - 1);
    return flow(e.state_after, t - e.t);
  }

  /// CSV with header t,kind,n,x,y; 12 significant digits on reals.
  void write_csv(std::ostream& os) const {
    os << "t,kind,n,x,y\n";
    char buf[128];
    for (const auto& e : events) {
      std::snprintf(buf, sizeof(buf), "%.12g,%s,%u,%.12g,%.12g\n", e.t,
                    event_kind_name(e.kind), e.state_after.n, e.state_after.x,
                    e.state_after.y);
      os << buf;
    }
  }
};

}  // namespace pdq
