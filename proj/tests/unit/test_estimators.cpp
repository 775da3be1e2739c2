#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pdq/estimators.hpp"
#include "pdq/oracles.hpp"

using namespace pdq;

namespace {

IntensityField mm1_field() {
  return IntensityField::parse("1", "2", "1", 1.0, 2.0);
}

}  // namespace

TEST_CASE("ratio estimator basics", "[estimators]") {
  std::vector<double> dens(200), nums(200);
  for (std::size_t i = 0; i < dens.size(); ++i) {
    dens[i] = 1.0 + 0.001 * static_cast<double>(i % 7);
    nums[i] = 2.0 * dens[i];
  }
  const auto est = ratio_estimate(nums, dens);
  REQUIRE(est.value == Catch::Approx(2.0).epsilon(1e-14));
  REQUIRE(est.std_error == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(est.n_samples == 200);

  REQUIRE_THROWS_AS(ratio_estimate(std::vector<double>(50, 1.0),
                                   std::vector<double>(50, 1.0)),
                    InsufficientCyclesError);
}

TEST_CASE("ratio estimator is invariant under reordering", "[estimators]") {
  std::mt19937_64 g(99);
  std::vector<double> nums(1000), dens(1000);
  for (std::size_t i = 0; i < nums.size(); ++i) {
    dens[i] = 0.5 + (g() >> 40) * 0x1.0p-24;
    nums[i] = 0.25 * dens[i] + ((g() >> 40) * 0x1.0p-24 - 0.125);
  }
  const auto base = ratio_estimate(nums, dens);
  std::vector<std::size_t> order(nums.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), g);
  std::vector<double> nums2, dens2;
  for (std::size_t i : order) {
    nums2.push_back(nums[i]);
    dens2.push_back(dens[i]);
  }
  const auto shuffled = ratio_estimate(nums2, dens2);
  REQUIRE(base.value == shuffled.value);
  REQUIRE(base.std_error == shuffled.std_error);
}

TEST_CASE("availability factors reproduce the geometric law", "[estimators]") {
  const auto f = mm1_field();
  const auto cycles = collect_cycles_parallel(f, 10, 10000, {}, 4242, 2);
  double sum = 0.0;
  std::size_t max_n = 0;
  for (const auto& c : cycles)
    max_n = std::max(max_n, c.occupancy.size());
  for (std::uint32_t m = 0; m < max_n; ++m) {
    const auto est = availability_factor(cycles, m);
    sum += est.value;
    if (m <= 4) {
      const double expect = mm1_stationary_pmf(1.0, 2.0, m);
      INFO("m=" << m);
      REQUIRE(std::fabs(est.value - expect) <= 3 * est.std_error + 1e-9);
    }
  }
  // The empirical distribution over the visited range is a probability law.
  REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("stationary functional matches the occupancy route", "[estimators]") {
  const auto f = mm1_field();
  const std::vector<CycleFunctional> fns = {CycleFunctional::number_in_system()};
  const auto cycles = collect_cycles_parallel(f, 10, 8000, fns, 515, 2);
  const auto direct = stationary_functional(cycles, 0);
  // M/M/1 mean queue length rho/(1-rho) = 1.
  REQUIRE(std::fabs(direct.value - 1.0) <= 3 * direct.std_error);
  // Same number through availability factors.
  double via_occupancy = 0.0;
  std::size_t max_n = 0;
  for (const auto& c : cycles) max_n = std::max(max_n, c.occupancy.size());
  for (std::uint32_t m = 1; m < max_n; ++m)
    via_occupancy += m * availability_factor(cycles, m).value;
  REQUIRE(direct.value == Catch::Approx(via_occupancy).margin(1e-10));
}

TEST_CASE("drain-time moments against closed forms", "[estimators]") {
  // Pure death at rate 2: tau0 from (j,0,0) is Gamma(j, 2).
  const auto f = IntensityField::parse("0", "2", "0", 0.0, 2.0);
  const std::vector<StateX> starts = {{1, 0.0, 0.0}, {5, 0.0, 0.0}};
  const auto table =
      hitting_moment_experiment(f, starts, 2, 3, 10000, 1e6, 808, 2);
  REQUIRE(table.rows.size() == 2);
  REQUIRE(table.censor_gate_ok);
  // E tau^2 = j/4 + (j/2)^2.
  const double expect1 = 0.25 + 0.25;
  const double expect5 = 5.0 / 4.0 + 6.25;
  REQUIRE(std::fabs(table.rows[0].tau_moment.value - expect1) <=
          3 * table.rows[0].tau_moment.std_error);
  REQUIRE(std::fabs(table.rows[1].tau_moment.value - expect5) <=
          3 * table.rows[1].tau_moment.std_error);
  REQUIRE(table.rows[0].lyapunov_weight == 8.0);    // (1+1)^3
  REQUIRE(table.rows[1].lyapunov_weight == 216.0);  // (5+1)^3
  REQUIRE(table.rows[0].ratio ==
          Catch::Approx(table.rows[0].tau_moment.value / 8.0));
}

TEST_CASE("heavy censoring trips the gate", "[estimators]") {
  const auto f = IntensityField::parse("0", "0.01", "0", 0.0, 0.01);
  const auto table = hitting_moment_experiment(f, {{1, 0.0, 0.0}}, 1, 2, 500,
                                               1.0, 11, 1);
  REQUIRE_FALSE(table.censor_gate_ok);
  REQUIRE(table.rows[0].censored > 450);
}
