#include <catch2/catch_amalgamated.hpp>

#include "pdq/lyapunov.hpp"
#include "pdq/state.hpp"

using namespace pdq;

TEST_CASE("jump maps follow the queue dynamics", "[state]") {
  const StateX s{2, 1.5, 0.75};
  REQUIRE(jump_up(s) == StateX{3, 1.5, 0.0});
  REQUIRE(jump_down(s) == StateX{1, 0.0, 0.75});

  // Arrival to an empty system starts a fresh service and resets the
  // arrival clock.
  REQUIRE(jump_up({0, 0.0, 2.0}) == StateX{1, 0.0, 0.0});
  // Queue length is floored at zero.
  REQUIRE(jump_down({0, 0.0, 2.0}) == StateX{0, 0.0, 2.0});
}

TEST_CASE("flow advances clocks at unit rate", "[state]") {
  REQUIRE(flow({2, 1.0, 0.5}, 0.25) == StateX{2, 1.25, 0.75});
  // The service clock freezes while idle.
  REQUIRE(flow({0, 0.0, 0.5}, 3.0) == StateX{0, 0.0, 3.5});
  REQUIRE(flow({1, 1.0, 1.0}, 0.0) == StateX{1, 1.0, 1.0});
}

TEST_CASE("flow is a semigroup", "[state]") {
  const StateX s{3, 0.3, 1.7};
  for (double a : {0.1, 0.25, 1.5}) {
    for (double b : {0.05, 0.75, 2.0}) {
      const StateX two_steps = flow(flow(s, a), b);
      const StateX one_step = flow(s, a + b);
      REQUIRE(two_steps.n == one_step.n);
      REQUIRE(two_steps.x == Catch::Approx(one_step.x).margin(1e-12));
      REQUIRE(two_steps.y == Catch::Approx(one_step.y).margin(1e-12));
    }
  }
}

TEST_CASE("state validity", "[state]") {
  REQUIRE(is_valid_state({0, 0.0, 5.0}));
  REQUIRE(is_valid_state({4, 2.0, 1.0}));
  REQUIRE_FALSE(is_valid_state({0, 0.5, 0.0}));  // idle with a running service
  REQUIRE_FALSE(is_valid_state({1, -0.5, 0.0}));
}

TEST_CASE("polynomial moment weights", "[state]") {
  REQUIRE(lyapunov_L({1, 1.0, 1.0}, 2) == 16.0);
  REQUIRE(lyapunov_L({0, 0.0, 0.0}, 1) == 1.0);
  REQUIRE(lyapunov_L({0, 0.0, 0.0}, 3) == 1.0);
  REQUIRE(lyapunov_L({4, 0.0, 0.0}, 1) == 5.0);
  REQUIRE(lyapunov_Lkm(1.0, {1, 1.0, 1.0}, 2, 1) == 16.0);
  REQUIRE(lyapunov_Lkm(0.0, {1, 1.0, 1.0}, 3, 2) == 16.0);
  REQUIRE(lyapunov_Lkm(2.0, {0, 0.0, 0.0}, 2, 5) == 9.0);
}
