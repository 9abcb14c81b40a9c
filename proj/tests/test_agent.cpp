#include "recal/agent.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "recal/effective_model.hpp"
#include "recal/error.hpp"
#include "support/stats.hpp"

using namespace recal;

namespace {

AgentState seeded_state(double intensity, const DisplacementGrid& grid) {
  IntensityEstimate est;
  est.value = intensity;
  est.uncertainty = 1e-3;
  est.sample_count = 1000;
  AgentState state{seed_qtable(est, grid)};
  state.epsilon = 1.0;
  return state;
}

Hyperparameters table_one_proposed() {
  Hyperparameters hp;
  hp.n_eff = 1000;
  hp.n_rl = 50000;
  hp.delta = 0.1;
  hp.epsilon0 = 0.05;
  hp.delta_epsilon = 0.9;
  hp.delta_weight = 50.0;
  hp.delta_l = 150.0;
  hp.gamma = 1.0;
  hp.check_jump_threshold = 3000;
  return hp;
}

}  // namespace

TEST_CASE("exploration weights") {
  SUBCASE("zero sharpness is exactly uniform") {
    const std::vector<double> values{0.2, 0.9, 0.4, 0.7};
    for (double w : exploration_weights(values, 0.0)) CHECK(w == 0.25);
  }
  SUBCASE("equal values split evenly at any sharpness") {
    const std::vector<double> values{0.9, 0.9};
    for (double w : exploration_weights(values, 37.0)) CHECK(w == 0.5);
  }
  SUBCASE("two-action normalization") {
    const std::vector<double> values{0.9, 0.5};
    const std::vector<double> w = exploration_weights(values, 50.0);
    // 1 / (1 + e^{-8})
    CHECK(w[0] == doctest::Approx(0.9996646498695335).epsilon(1e-14));
    CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("rejects an empty value list") {
    Rng rng(1);
    CHECK_THROWS_AS(weighted_exploration({}, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(exploration_weights({}, 1.0), std::invalid_argument);
  }
}

TEST_CASE("weighted exploration sampling matches its distribution") {
  Rng rng(5);
  SUBCASE("uniform draws pass a chi-square test") {
    const std::vector<double> values{0.2, 0.9, 0.4, 0.7};
    std::vector<std::uint64_t> counts(4, 0);
    for (int i = 0; i < 100000; ++i)
      counts[weighted_exploration(values, 0.0, rng)]++;
    const std::vector<double> expected(4, 0.25);
    CHECK(test_stats::chi2_gof_p(counts, expected) > 0.01);
  }
  SUBCASE("sharp draws concentrate near the maximum") {
    const std::vector<double> values{0.9, 0.85, 0.5, 0.2};
    const std::vector<double> expected = exploration_weights(values, 50.0);
    std::vector<std::uint64_t> counts(4, 0);
    for (int i = 0; i < 100000; ++i)
      counts[weighted_exploration(values, 50.0, rng)]++;
    // Tail bins are tiny; fold them into the second bin for a valid test.
    const std::vector<std::uint64_t> folded{counts[0],
                                            counts[1] + counts[2] + counts[3]};
    const std::vector<double> folded_p{expected[0],
                                       expected[1] + expected[2] + expected[3]};
    CHECK(test_stats::chi2_gof_p(folded, folded_p) > 0.01);
    CHECK(counts[0] > 60000);
  }
}

TEST_CASE("displacement selection") {
  const DisplacementGrid grid = DisplacementGrid::uniform(-1.5, 1.5, 25);
  AgentState state{QTable::uniform(grid)};
  const Hyperparameters hp = table_one_proposed();
  Rng rng(6);

  SUBCASE("pure greed returns the argmax") {
    state.table.q0[7] = 0.9;
    state.epsilon = 0.0;
    for (int i = 0; i < 100; ++i)
      CHECK(select_displacement(state, hp, rng) == 7);
  }
  SUBCASE("ties resolve to the lowest index") {
    state.epsilon = 0.0;
    CHECK(select_displacement(state, hp, rng) == 0);
  }
  SUBCASE("full exploration with zero sharpness is uniform") {
    state.epsilon = 1.0;
    Hyperparameters flat = hp;
    flat.delta_weight = 0.0;
    std::vector<std::uint64_t> counts(grid.size(), 0);
    for (int i = 0; i < 100000; ++i)
      counts[select_displacement(state, flat, rng)]++;
    const std::vector<double> expected(grid.size(), 1.0 / grid.size());
    CHECK(test_stats::chi2_gof_p(counts, expected) > 0.01);
  }
  SUBCASE("peaked values concentrate exploration draws near the argmax") {
    state.epsilon = 1.0;
    for (std::size_t g = 0; g < grid.size(); ++g)
      state.table.q0[g] = 0.5 + 0.4 * std::exp(-grid.values[g] * grid.values[g]);
    const std::vector<double> expected =
        exploration_weights(state.table.q0, hp.delta_weight);
    std::vector<std::uint64_t> counts(grid.size(), 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
      counts[select_displacement(state, hp, rng)]++;
    // Chi-square over the bins with expected counts above 10.
    std::vector<std::uint64_t> big_counts;
    std::vector<double> big_p;
    std::uint64_t rest_count = 0;
    double rest_p = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (expected[g] * draws >= 10.0) {
        big_counts.push_back(counts[g]);
        big_p.push_back(expected[g]);
      } else {
        rest_count += counts[g];
        rest_p += expected[g];
      }
    }
    big_counts.push_back(rest_count);
    big_p.push_back(rest_p);
    CHECK(test_stats::chi2_gof_p(big_counts, big_p) > 0.01);
  }
}

TEST_CASE("guess selection") {
  const DisplacementGrid grid = DisplacementGrid::uniform(-1.5, 1.5, 25);
  const Hyperparameters hp = table_one_proposed();
  Rng rng(7);

  SUBCASE("pure greed picks the larger guess value, ties to zero") {
    AgentState state{QTable::uniform(grid)};
    state.epsilon = 0.0;
    state.table.q1[QTable::q1_index(3, 1, 0)] = 0.6;
    CHECK(select_guess(state, 3, 1, hp, rng) == 0);
    state.table.q1[QTable::q1_index(3, 1, 1)] = 0.7;
    CHECK(select_guess(state, 3, 1, hp, rng) == 1);
    CHECK(select_guess(state, 4, 0, hp, rng) == 0);  // exact tie
  }
  SUBCASE("on a seeded table the nulling point maps no-click to the nulled bit") {
    AgentState state = seeded_state(0.4, grid);
    state.epsilon = 0.0;
    // Closest grid point to +alpha keeps khat=1 as the no-click maximum.
    const double alpha = std::sqrt(0.4);
    std::size_t gi = 0;
    for (std::size_t g = 0; g < grid.size(); ++g)
      if (std::abs(grid.values[g] - alpha) <
          std::abs(grid.values[gi] - alpha))
        gi = g;
    CHECK(select_guess(state, gi, 0, hp, rng) == 1);
  }
  SUBCASE("full exploration with zero sharpness is a fair coin") {
    AgentState state{QTable::uniform(grid)};
    state.epsilon = 1.0;
    Hyperparameters flat = hp;
    flat.delta_weight = 0.0;
    std::vector<std::uint64_t> counts(2, 0);
    for (int i = 0; i < 100000; ++i) counts[select_guess(state, 5, 0, flat, rng)]++;
    const std::vector<double> expected(2, 0.5);
    CHECK(test_stats::chi2_gof_p(counts, expected) > 0.01);
  }
}

TEST_CASE("learning rate schedule") {
  CHECK(learning_rate(0, 150.0) == doctest::Approx(0.006666666666666667));
  CHECK(learning_rate(0, 1.0) == 1.0);
  double previous = learning_rate(0, 150.0);
  for (std::uint64_t t = 1; t < 10000; t *= 2) {
    const double rate = learning_rate(t, 150.0);
    CHECK(rate < previous);
    previous = rate;
  }
  CHECK(learning_rate(1000000000, 150.0) < 1e-8);
}

TEST_CASE("episode update performs the two backups in order") {
  DisplacementGrid grid;
  grid.values = {-0.5, 0.0, 0.5};
  Hyperparameters hp = table_one_proposed();

  SUBCASE("terminal backup is a convex combination toward the reward") {
    AgentState state{QTable::uniform(grid)};
    hp.delta_l = 10.0;  // learning rate 1/10 at zero visits
    hp.gamma = 0.0;     // isolate the q1 move
    update_after_episode(state, 1, 0, 1, 1, hp);
    CHECK(state.table.q1_at(1, 0, 1) == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(state.table.visits1[QTable::q1_index(1, 0, 1)] == 1);
    CHECK(state.table.visits0[1] == 1);
  }
  SUBCASE("intermediate backup bootstraps from the refreshed q1 maximum") {
    AgentState state{QTable::uniform(grid)};
    hp.delta_l = 2.0;  // rate 1/2 on both backups
    hp.gamma = 1.0;
    state.table.q0[2] = 0.6;
    state.table.q1[QTable::q1_index(2, 1, 0)] = 0.8;
    state.table.q1[QTable::q1_index(2, 1, 1)] = 0.1;
    // khat=1 with r=0 halves q1[2,1,1] to 0.05; the max stays 0.8.
    update_after_episode(state, 2, 1, 1, 0, hp);
    CHECK(state.table.q1_at(2, 1, 1) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(state.table.q0[2] == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("exactly one q1 entry and one q0 entry move per update") {
    AgentState state = seeded_state(0.4, DisplacementGrid::uniform(-1.5, 1.5, 25));
    const QTable before = state.table;
    update_after_episode(state, 9, 1, 0, 1, hp);
    int q0_moves = 0, q1_moves = 0;
    for (std::size_t i = 0; i < before.q0.size(); ++i)
      q0_moves += state.table.q0[i] != before.q0[i];
    for (std::size_t i = 0; i < before.q1.size(); ++i)
      q1_moves += state.table.q1[i] != before.q1[i];
    CHECK(q0_moves == 1);
    CHECK(q1_moves == 1);
  }
}

TEST_CASE("repeated updates converge to the Bernoulli mean") {
  DisplacementGrid grid;
  grid.values = {-0.5, 0.0, 0.5};
  AgentState state{QTable::uniform(grid)};
  Hyperparameters hp = table_one_proposed();
  hp.delta_l = 1.0;  // plain running average
  Rng rng(8);
  const double p = 0.3;
  const int updates = 10000;
  for (int i = 0; i < updates; ++i)
    update_after_episode(state, 0, 1, 1, rng.bernoulli(p) ? 1 : 0, hp);
  const double se = std::sqrt(p * (1 - p) / updates);
  CHECK(std::abs(state.table.q1_at(0, 1, 1) - p) < 3.0 * se);
}

TEST_CASE("q values stay in range under random update storms") {
  DisplacementGrid grid = DisplacementGrid::uniform(-1.5, 1.5, 9);
  AgentState state = seeded_state(0.7, grid);
  Hyperparameters hp = table_one_proposed();
  Rng rng(9);
  for (int i = 0; i < 100000; ++i) {
    const auto g = static_cast<std::size_t>(rng.raw() % grid.size());
    const int n = rng.bernoulli(0.5);
    const int khat = rng.bernoulli(0.5);
    const int r = rng.bernoulli(0.5);
    hp.gamma = rng.uniform();
    update_after_episode(state, g, n, khat, r, hp);
  }
  for (double q : state.table.q0) {
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
  }
  for (double q : state.table.q1) {
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
  }
}

TEST_CASE("adding a constant to q0 changes neither greed nor exploration") {
  DisplacementGrid grid = DisplacementGrid::uniform(-1.5, 1.5, 25);
  AgentState state{QTable::uniform(grid)};
  Rng rng(10);
  // Values on a coarse binary lattice so the shift is exact in floating point.
  for (std::size_t g = 0; g < grid.size(); ++g)
    state.table.q0[g] = static_cast<double>(rng.raw() % 512) / 1024.0;
  AgentState shifted = state;
  for (double& q : shifted.table.q0) q += 0.25;

  CHECK(state.table.greedy_index() == shifted.table.greedy_index());
  const auto w0 = exploration_weights(state.table.q0, 50.0);
  const auto w1 = exploration_weights(shifted.table.q0, 50.0);
  for (std::size_t i = 0; i < w0.size(); ++i) CHECK(w0[i] == w1[i]);
}

TEST_CASE("epsilon schedule") {
  CHECK(epsilon_step(1.0, 0.05, 0.9) == 0.9);
  CHECK(epsilon_step(0.05, 0.05, 0.9) == 0.05);
  CHECK(epsilon_step(1.0, 0.1, 0.9999) == 0.9999);

  double eps = 1.0;
  double previous = eps;
  for (int i = 0; i < 500; ++i) {
    eps = epsilon_step(eps, 0.05, 0.9);
    CHECK(eps <= previous);
    CHECK(eps >= 0.05);
    previous = eps;
  }
  CHECK(eps == 0.05);
}

TEST_CASE("greedy configuration") {
  const DisplacementGrid grid = DisplacementGrid::uniform(-1.5, 1.5, 25);
  SUBCASE("fresh seeded table plays a nulling point and guesses the nulled bit") {
    AgentState state = seeded_state(0.4, [] {
      DisplacementGrid g;
      const double alpha = std::sqrt(0.4);
      g.values = {-alpha, -0.2, 0.0, 0.2, alpha};
      return g;
    }());
    const DecisionRule rule = greedy_configuration(state);
    CHECK(rule.displacement == -std::sqrt(0.4));
    // At -alpha the k=0 hypothesis is nulled, so no click means k=0.
    CHECK(rule.guess[0] == 0);
    CHECK(rule.guess[1] == 1);
  }
  SUBCASE("all-equal table falls back to the lowest grid index") {
    AgentState state{QTable::uniform(grid)};
    CHECK(greedy_configuration(state).displacement == grid.values.front());
  }
}

TEST_CASE("convergence check counts the greedy streak") {
  DisplacementGrid grid;
  grid.values = {-0.5, 0.0, 0.5};
  AgentState state{QTable::uniform(grid)};
  const Hyperparameters hp = table_one_proposed();

  CHECK_FALSE(check_convergence(state, 3000));  // empty history

  state.table.q0[2] = 0.9;
  for (int i = 0; i < 3000; ++i) update_after_episode(state, 2, 0, 0, 1, hp);
  CHECK(check_convergence(state, 3000));

  // One experiment with a different greedy index breaks the streak.
  state.table.q0[0] = 0.99;
  update_after_episode(state, 0, 0, 0, 1, hp);
  CHECK_FALSE(check_convergence(state, 3000));
  CHECK(check_convergence(state, 1));
}

TEST_CASE("hyperparameter validation") {
  Hyperparameters hp = table_one_proposed();
  CHECK_NOTHROW(hp.validate());
  hp.delta = 1.5;
  CHECK_THROWS_AS(hp.validate(), validation_error);
  hp = table_one_proposed();
  hp.delta_l = 0.5;
  CHECK_THROWS_AS(hp.validate(), validation_error);
  hp = table_one_proposed();
  hp.epsilon0 = 1.0;
  CHECK_THROWS_AS(hp.validate(), validation_error);

  const Hyperparameters base = table_one_proposed().baseline_variant();
  CHECK(base.epsilon0 == 0.1);
  CHECK(base.delta_epsilon == 0.9999);
  CHECK(base.delta_weight == 0.0);
  CHECK(base.delta_l == 1.0);
  CHECK(base.n_eff == 1000);
  CHECK(base.check_jump_threshold == 3000);
}
