#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pdq/dynkin.hpp"
#include "pdq/generator.hpp"
#include "pdq/intensity.hpp"

using namespace pdq;

namespace {

IntensityField mm1_field() {
  return IntensityField::parse("1", "2", "1", 1.0, 2.0);
}

}  // namespace

TEST_CASE("constant test function gives an exactly zero residual",
          "[dynkin]") {
  const auto f = mm1_field();
  const auto fn = TestFunction::constant(1.0);
  const auto res = dynkin_residual(f, fn, StateX{2, 0.3, 0.1}, 4.0, 32, 77);
  REQUIRE(res.residual.value == 0.0);
  REQUIRE(res.residual.std_error == 0.0);
  REQUIRE(res.fn_scale == 2.0);
  REQUIRE(res.replicas == 32);
  REQUIRE(res.t_end == 4.0);
}

TEST_CASE("pure transport with no events telescopes exactly", "[dynkin]") {
  // All rates zero: the path is a single flow segment, so the endpoint
  // difference cancels the integral to the last bit.
  const auto f = IntensityField::parse("0", "0", "0", 0.0, 0.0);
  const auto fn = TestFunction::coordinate_sum();
  for (auto sampler : {SamplerKind::thinning, SamplerKind::inversion}) {
    const auto res = dynkin_residual(f, fn, StateX{1, 0.5, 0.2}, 3.0, 8, 5,
                                     1, sampler);
    REQUIRE(res.residual.value == 0.0);
    REQUIRE(res.residual.std_error == 0.0);
  }
}

TEST_CASE("residual is mean-zero for a birth-death field", "[dynkin]") {
  const auto f = mm1_field();
  const auto fn = TestFunction::lyapunov_capped(1, 1e3);
  const auto res =
      dynkin_residual(f, fn, StateX{1, 0.0, 0.0}, 5.0, 2000, 20260815);
  CAPTURE(res.residual.value, res.residual.std_error, res.fn_scale);
  REQUIRE(res.residual.std_error > 0.0);
  REQUIRE(std::fabs(res.residual.value) <= 3.0 * res.residual.std_error);
  REQUIRE(res.fn_scale > 1.0);
}

TEST_CASE("residual is mean-zero under the inversion sampler", "[dynkin]") {
  const auto f = IntensityField::parse("0.5", "6/(1+x)", "0.5", 0.5, 6.0);
  const auto fn = TestFunction::lyapunov_capped(2, 1e3);
  const auto res = dynkin_residual(f, fn, StateX{2, 0.0, 0.0}, 4.0, 1200, 9,
                                   1, SamplerKind::inversion);
  CAPTURE(res.residual.value, res.residual.std_error);
  REQUIRE(std::fabs(res.residual.value) <= 3.0 * res.residual.std_error);
}

TEST_CASE("parallel evaluation reproduces the serial residual", "[dynkin]") {
  const auto f = mm1_field();
  const auto fn = TestFunction::lyapunov_capped(1, 1e3);
  const auto serial =
      dynkin_residual(f, fn, StateX{1, 0.0, 0.0}, 2.0, 240, 31, 1);
  const auto threaded =
      dynkin_residual(f, fn, StateX{1, 0.0, 0.0}, 2.0, 240, 31, 4);
  REQUIRE(serial.residual.value == threaded.residual.value);
  REQUIRE(serial.residual.std_error == threaded.residual.std_error);
  REQUIRE(serial.fn_scale == threaded.fn_scale);
}

TEST_CASE("constant time-weighted function gives an exactly zero residual",
          "[dynkin]") {
  const auto f = mm1_field();
  const auto fn = TimeTestFunction::constant(2.5);
  const auto res =
      dynkin_residual_time(f, fn, StateX{1, 0.1, 0.0}, 3.0, 16, 11);
  REQUIRE(res.residual.value == 0.0);
  REQUIRE(res.residual.std_error == 0.0);
  REQUIRE(res.fn_scale == 5.0);
}

TEST_CASE("time-weighted residual is mean-zero", "[dynkin]") {
  const auto f = mm1_field();
  const auto fn = TimeTestFunction::lyapunov_capped(1, 1, 1e3);
  const auto res =
      dynkin_residual_time(f, fn, StateX{1, 0.0, 0.0}, 3.0, 1500, 4242);
  CAPTURE(res.residual.value, res.residual.std_error, res.fn_scale);
  REQUIRE(res.residual.std_error > 0.0);
  REQUIRE(std::fabs(res.residual.value) <= 3.0 * res.residual.std_error);
}
