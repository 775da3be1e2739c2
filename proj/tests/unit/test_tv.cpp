#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "pdq/rng.hpp"
#include "pdq/tv.hpp"

using namespace pdq;

TEST_CASE("total variation matches hand values", "[tv]") {
  REQUIRE(total_variation({1.0, 0.0}, {0.0, 1.0}) == 1.0);
  REQUIRE(total_variation({0.5, 0.5}, {0.25, 0.75}) == 0.25);
  // Ragged lengths: the shorter histogram has zero tail mass.
  REQUIRE(total_variation({1.0}, {0.5, 0.25, 0.25}) == 0.5);
  REQUIRE(total_variation({}, {1.0}) == 0.5);
}

TEST_CASE("total variation is a metric on random pmfs", "[tv]") {
  RngStream rng(404, 0);
  auto random_pmf = [&](std::size_t k) {
    Histogram h(k);
    for (double& v : h) v = rng.uniform01();
    return normalize_histogram(std::move(h));
  };
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_pmf(6), q = random_pmf(6), r = random_pmf(6);
    const double pq = total_variation(p, q);
    REQUIRE(pq >= 0.0);
    REQUIRE(pq <= 1.0);
    REQUIRE(pq == total_variation(q, p));
    REQUIRE(total_variation(p, p) == 0.0);
    REQUIRE(pq <= total_variation(p, r) + total_variation(r, q) + 1e-12);
  }
}

TEST_CASE("normalize_histogram validates its input", "[tv]") {
  const auto h = normalize_histogram({1.0, 3.0});
  REQUIRE(h[0] == 0.25);
  REQUIRE(h[1] == 0.75);
  REQUIRE_THROWS_AS(normalize_histogram({0.0, 0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(normalize_histogram({1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("occupancy histogram pools cycle time by level", "[tv]") {
  RegenerationCycle a, b;
  a.length = 3.0;
  a.occupancy = {1.0, 2.0};
  b.length = 5.0;
  b.occupancy = {0.0, 1.0, 4.0};
  const auto h = occupancy_histogram({a, b});
  REQUIRE(h.size() == 3);
  REQUIRE(h[0] == 0.125);
  REQUIRE(h[1] == 0.375);
  REQUIRE(h[2] == 0.5);
  REQUIRE_THROWS_AS(occupancy_histogram({}), std::invalid_argument);
}

TEST_CASE("multinomial draws concentrate near the source pmf", "[tv]") {
  const Histogram pmf{0.2, 0.3, 0.5};
  RngStream rng(2024, 0);
  const auto sample = multinomial_pmf_draw(pmf, 20000, rng);
  REQUIRE(sample.size() == 3);
  double total = 0.0;
  for (double v : sample) total += v;
  REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(total_variation(sample, pmf) < 0.02);

  RngStream again(2024, 0);
  REQUIRE(multinomial_pmf_draw(pmf, 20000, again) == sample);
}

TEST_CASE("noise floor is deterministic and shrinks with sample size",
          "[tv]") {
  const Histogram ref{0.5, 0.25, 0.125, 0.125};
  const auto small = bootstrap_noise_floor(ref, 1000, 400, 7, 3);
  const auto big = bootstrap_noise_floor(ref, 16000, 400, 7, 3);
  REQUIRE(small.mean > 0.0);
  REQUIRE(small.sd > 0.0);
  REQUIRE(small.q999 >= small.mean);
  // Multinomial TV error scales like n^(-1/2): 16x the samples, ~4x less.
  REQUIRE(big.mean < 0.5 * small.mean);

  const auto repeat = bootstrap_noise_floor(ref, 1000, 400, 7, 3);
  REQUIRE(repeat.mean == small.mean);
  REQUIRE(repeat.sd == small.sd);
  REQUIRE(repeat.q999 == small.q999);
}

TEST_CASE("bootstrap tv standard error is positive and deterministic",
          "[tv]") {
  const Histogram ref{0.5, 0.3, 0.2};
  const Histogram emp{0.45, 0.35, 0.2};
  const double se = bootstrap_tv_se(emp, ref, 2000, 200, 11, 8);
  REQUIRE(se > 0.0);
  REQUIRE(se < 0.05);
  REQUIRE(bootstrap_tv_se(emp, ref, 2000, 200, 11, 8) == se);
}
