#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pdq/hazard.hpp"
#include "pdq/oracles.hpp"

using namespace pdq;

TEST_CASE("geometric stationary law sums to one", "[oracles]") {
  double sum = 0.0;
  for (std::uint32_t m = 0; m <= 200; ++m) sum += mm1_stationary_pmf(1.0, 2.0, m);
  REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(mm1_stationary_pmf(1.0, 2.0, 0) == 0.5);
  REQUIRE(mm1_stationary_pmf(1.0, 2.0, 3) == Catch::Approx(0.0625));
  REQUIRE_THROWS_AS(mm1_stationary_pmf(2.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("queue-length means are consistent", "[oracles]") {
  REQUIRE(mm1_mean_number(1.0, 2.0) == Catch::Approx(1.0));
  REQUIRE(mm1_busy_period_mean(1.0, 2.0) == Catch::Approx(1.0));
  // Exponential service (scv = 1) reduces the general formula to M/M/1.
  REQUIRE(mg1_mean_number(0.5, 1.0) ==
          Catch::Approx(mm1_mean_number(1.0, 2.0)).epsilon(1e-14));
  // Erlang-2 service at utilization 1/2: 0.5 + 0.25*1.5/1 = 0.875.
  REQUIRE(mg1_mean_number(0.5, 0.5) == Catch::Approx(0.875).epsilon(1e-14));
}

TEST_CASE("service law moments", "[oracles]") {
  const auto exp_law = ServiceLaw::exponential(2.0);
  REQUIRE(exp_law.mean() == 0.5);
  REQUIRE(exp_law.scv() == 1.0);

  const auto erl = ServiceLaw::erlang2(4.0);
  REQUIRE(erl.mean() == 0.5);
  REQUIRE(erl.scv() == 0.5);
  REQUIRE(erl.hazard(0.0) == 0.0);
  REQUIRE(erl.hazard(1e9) == Catch::Approx(4.0).epsilon(1e-6));

  const auto par = ServiceLaw::pareto_hazard(3.0);
  REQUIRE(par.mean() == 0.5);
  REQUIRE(par.scv() == 3.0);
  REQUIRE(par.survival(1.0) == Catch::Approx(0.125));
  REQUIRE_THROWS_AS(ServiceLaw::pareto_hazard(1.5).scv(),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(ServiceLaw::pareto_hazard(0.5).mean(),
                    std::invalid_argument);
}

TEST_CASE("hazard expressions reconstruct their survival laws", "[oracles]") {
  // exp(-int_0^x hazard) must reproduce the closed-form survival; the
  // hazard string is parsed and integrated along the service clock.
  for (const auto& law :
       {ServiceLaw::exponential(2.0), ServiceLaw::erlang2(4.0),
        ServiceLaw::pareto_hazard(2.0)}) {
    const double sup =
        law.family == ServiceLaw::Family::exponential ? law.param : 4.0;
    const auto f =
        IntensityField::parse("0", law.hazard_expr(), "0", 0.0, sup);
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
      const double sim = survival_probability(f, {1, 0.0, 0.0}, x);
      INFO(law.hazard_expr() << " at x=" << x);
      REQUIRE(sim == Catch::Approx(law.survival(x)).epsilon(1e-8));
    }
  }
  REQUIRE(ServiceLaw::pareto_hazard(2.0).survival(1.0) == 0.25);
}

TEST_CASE("hazard expressions evaluate like their closed forms", "[oracles]") {
  const auto erl = ServiceLaw::erlang2(4.0);
  const auto e = parse_intensity(erl.hazard_expr());
  for (double x : {0.0, 0.25, 1.0, 10.0})
    REQUIRE(eval_intensity(e, {1, x, 0.0}) ==
            Catch::Approx(erl.hazard(x)).epsilon(1e-13));
}
