// Estimates the long-run queue-length law of the constant-rate queue from
// regeneration cycles and prints it next to the exact geometric solution,
// then checks the mean drain time against the busy-period formula.

#include <cstdio>

#include "pdq/cycles.hpp"
#include "pdq/estimators.hpp"
#include "pdq/intensity.hpp"
#include "pdq/oracles.hpp"

int main() {
  const double lambda = 1.0, mu = 2.0;
  const auto field = pdq::IntensityField::parse("1", "2", "1", lambda, mu);

  const auto cycles =
      pdq::collect_cycles_parallel(field, 100, 20000, {}, 42, 1);
  std::printf("long-run queue-length law, %zu cycles\n", cycles.size());
  std::printf("%5s %12s %12s %12s\n", "n", "estimate", "exact", "std error");
  for (std::uint32_t n = 0; n <= 6; ++n) {
    const auto est = pdq::availability_factor(cycles, n);
    std::printf("%5u %12.5f %12.5f %12.5f\n", n, est.value,
                pdq::mm1_stationary_pmf(lambda, mu, n), est.std_error);
  }

  const auto table = pdq::hitting_moment_experiment(
      field, {{1, 0.0, 0.0}}, 1, 2, 20000, 1e6, 42, 1);
  const auto& row = table.rows[0];
  std::printf("\nmean time to empty from one customer: %.4f (exact %.4f)\n",
              row.tau_moment.value, pdq::mm1_busy_period_mean(lambda, mu));
  return 0;
}
