#include "recal/effective_model.hpp"

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "recal/receiver.hpp"

using namespace recal;

TEST_CASE("intensity estimate from the no-click frequency") {
  const IntensityEstimate est = estimate_intensity(670, 1000);
  CHECK(est.value == doctest::Approx(0.4004775665971253).epsilon(1e-14));
  CHECK(est.uncertainty == 1.0 / 1000.0);
  CHECK(est.sample_count == 1000);
}

TEST_CASE("intensity estimate edge cases") {
  const IntensityEstimate all_dark = estimate_intensity(1000, 1000);
  CHECK(all_dark.value == 0.0);
  CHECK_FALSE(std::signbit(all_dark.value));

  // Half-count clamp: zero_count <- 1/2.
  const IntensityEstimate all_click = estimate_intensity(0, 1000);
  CHECK(all_click.value == doctest::Approx(7.600902459542082).epsilon(1e-14));

  CHECK_THROWS_AS(estimate_intensity(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_intensity(5, 4), std::invalid_argument);
}

TEST_CASE("intensity estimate is strictly decreasing in zero_count") {
  double previous = estimate_intensity(0, 1000).value;
  for (std::uint64_t zeros = 1; zeros <= 1000; ++zeros) {
    const double value = estimate_intensity(zeros, 1000).value;
    CHECK(value < previous);
    previous = value;
  }
}

TEST_CASE("q1 seed values") {
  IntensityEstimate est;
  est.value = 0.4;
  est.uncertainty = 1e-3;
  est.sample_count = 1000;
  const double alpha = std::sqrt(0.4);

  // (1/2) e^{-0.4}
  CHECK(q1_seed(est, 0.0, 0, 0) ==
        doctest::Approx(0.33516002301781966).epsilon(1e-14));
  // Nulling branch.
  CHECK(q1_seed(est, alpha, 0, 1) == 0.5);
  // theta = 0 makes the seed independent of the guess.
  CHECK(q1_seed(est, 0.0, 0, 0) == q1_seed(est, 0.0, 0, 1));
  CHECK(q1_seed(est, 0.0, 1, 0) == q1_seed(est, 0.0, 1, 1));
}

TEST_CASE("q1 seed branches over n sum to one half exactly") {
  IntensityEstimate est;
  for (double intensity : {0.0, 0.05, 0.4, 1.3, 2.7}) {
    est.value = intensity;
    for (int i = -40; i <= 40; ++i) {
      const double theta = 0.05 * i;
      for (int khat = 0; khat < 2; ++khat)
        CHECK(q1_seed(est, theta, 0, khat) + q1_seed(est, theta, 1, khat) ==
              0.5);
    }
  }
}

TEST_CASE("q0 seed values") {
  IntensityEstimate est;
  est.value = 0.4;
  CHECK(q0_seed(est, 0.0) == 0.5);
  CHECK(q0_seed(est, std::sqrt(0.4)) ==
        doctest::Approx(0.8990517410026723).epsilon(1e-14));

  est.value = 0.0;
  for (int i = -20; i <= 20; ++i) CHECK(q0_seed(est, 0.1 * i) == 0.5);
}

TEST_CASE("q0 seed equals the ideal-device oracle score") {
  // Mesh version of the acceptance check: the effective model and the
  // receiver oracle are independent code paths for the same quantity.
  IntensityEstimate est;
  for (int ii = 1; ii <= 10; ++ii) {
    est.value = 0.2 * ii;
    const EnvironmentSpec env = EnvironmentSpec::make(est.value);
    for (int ti = -10; ti <= 10; ++ti) {
      const double theta = 0.15 * ti;
      DecisionRule rule;
      rule.displacement = theta;
      for (int n = 0; n < 2; ++n)
        rule.guess[static_cast<std::size_t>(n)] =
            q1_seed(est, theta, n, 0) >= q1_seed(est, theta, n, 1) ? 0 : 1;
      CHECK(std::abs(q0_seed(est, theta) - true_score(env, rule)) < 1e-12);
    }
  }
}

TEST_CASE("seeded table holds the seeding identity and value ranges") {
  IntensityEstimate est;
  est.value = 0.4;
  const DisplacementGrid grid = DisplacementGrid::uniform(-1.5, 1.5, 25);
  const QTable table = seed_qtable(est, grid);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    double rebuilt = 0.0;
    for (int n = 0; n < 2; ++n)
      rebuilt += std::max(table.q1_at(g, n, 0), table.q1_at(g, n, 1));
    CHECK(table.q0[g] == rebuilt);  // exact, by construction
    CHECK(table.q0[g] >= 0.5);
    CHECK(table.q0[g] <= 1.0);
    CHECK(table.visits0[g] == 0);
    for (int j = 0; j < 4; ++j) {
      CHECK(table.q1[4 * g + j] >= 0.0);
      CHECK(table.q1[4 * g + j] <= 0.5);
      CHECK(table.visits1[4 * g + j] == 0);
    }
  }
}

TEST_CASE("seeded table peaks at a nulling point") {
  IntensityEstimate est;
  est.value = 0.4;
  const double alpha = std::sqrt(0.4);
  DisplacementGrid grid;
  grid.values = {-alpha, -0.2, 0.0, 0.2, alpha};
  const QTable table = seed_qtable(est, grid);
  const std::size_t best = table.greedy_index();
  CHECK(std::abs(grid.values[best]) == alpha);
  // The symmetric pair ties exactly; lowest index wins.
  CHECK(best == 0);
}
