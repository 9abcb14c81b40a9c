#include "recal/agent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "recal/error.hpp"

namespace recal {

QTable QTable::uniform(DisplacementGrid grid, double value) {
  grid.validate();
  QTable t;
  const std::size_t n = grid.size();
  t.grid = std::move(grid);
  t.q0.assign(n, value);
  t.q1.assign(4 * n, value);
  t.visits0.assign(n, 0);
  t.visits1.assign(4 * n, 0);
  return t;
}

std::size_t QTable::greedy_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < q0.size(); ++i)
    if (q0[i] > q0[best]) best = i;
  return best;
}

int QTable::greedy_guess(std::size_t g, int n) const {
  return q1_at(g, n, 0) >= q1_at(g, n, 1) ? 0 : 1;
}

void Hyperparameters::validate() const {
  auto fail = [](const char* field, double value, const char* bound) {
    std::ostringstream os;
    os << field << ": " << value << " out of range " << bound;
    throw validation_error(os.str());
  };
  if (n_eff < 1) fail("n_eff", static_cast<double>(n_eff), "[1, inf)");
  if (n_rl < 1) fail("n_rl", static_cast<double>(n_rl), "[1, inf)");
  if (check_jump_threshold < 1)
    fail("check_jump_threshold", static_cast<double>(check_jump_threshold),
         "[1, inf)");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta", delta, "(0, 1)");
  if (!(epsilon0 >= 0.0 && epsilon0 < 1.0)) fail("epsilon0", epsilon0, "[0, 1)");
  if (!(delta_epsilon >= 0.0 && delta_epsilon < 1.0))
    fail("delta_epsilon", delta_epsilon, "[0, 1)");
  if (!(delta_weight >= 0.0) || !std::isfinite(delta_weight))
    fail("delta_weight", delta_weight, "[0, inf)");
  if (!(delta_l >= 1.0) || !std::isfinite(delta_l))
    fail("delta_l", delta_l, "[1, inf)");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma", gamma, "[0, 1]");
}

Hyperparameters Hyperparameters::baseline_variant() const {
  Hyperparameters hp = *this;
  hp.epsilon0 = 0.1;
  hp.delta_epsilon = 0.9999;
  hp.delta_weight = 0.0;
  hp.delta_l = 1.0;
  return hp;
}

std::vector<double> exploration_weights(std::span<const double> values,
                                        double delta_weight) {
  if (values.empty())
    throw std::invalid_argument("exploration_weights: empty value list");
  const double qmax = *std::max_element(values.begin(), values.end());
  std::vector<double> w(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double gap = qmax - values[i];
    w[i] = std::exp(-delta_weight * gap * gap);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

std::size_t weighted_exploration(std::span<const double> values,
                                 double delta_weight, Rng& rng) {
  if (values.empty())
    throw std::invalid_argument("weighted_exploration: empty value list");
  const double qmax = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  std::vector<double> cumulative(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double gap = qmax - values[i];
    total += std::exp(-delta_weight * gap * gap);
    cumulative[i] = total;
  }
  const double u = rng.uniform() * total;
  for (std::size_t i = 0; i + 1 < cumulative.size(); ++i)
    if (u < cumulative[i]) return i;
  return cumulative.size() - 1;
}

std::size_t select_displacement(const AgentState& state,
                                const Hyperparameters& hp, Rng& rng) {
  if (rng.uniform() < state.epsilon)
    return weighted_exploration(state.table.q0, hp.delta_weight, rng);
  return state.table.greedy_index();
}

int select_guess(const AgentState& state, std::size_t g, int n,
                 const Hyperparameters& hp, Rng& rng) {
  if (rng.uniform() < state.epsilon) {
    const double values[2] = {state.table.q1_at(g, n, 0),
                              state.table.q1_at(g, n, 1)};
    return static_cast<int>(weighted_exploration(values, hp.delta_weight, rng));
  }
  return state.table.greedy_guess(g, n);
}

double learning_rate(std::uint64_t visit_count, double delta_l) {
  return 1.0 / (static_cast<double>(visit_count) + delta_l);
}

void update_after_episode(AgentState& state, std::size_t g, int n, int khat,
                          int reward, const Hyperparameters& hp) {
  QTable& t = state.table;
  const std::size_t i1 = QTable::q1_index(g, n, khat);

  // Terminal backup: the episode ends after the guess, so no bootstrap term.
  const double l1 = learning_rate(t.visits1[i1], hp.delta_l);
  t.q1[i1] = (1.0 - l1) * t.q1[i1] + l1 * static_cast<double>(reward);
  t.visits1[i1] += 1;

  // Intermediate backup: reward 0, bootstrap from the refreshed guess values.
  const double bootstrap =
      hp.gamma * std::max(t.q1_at(g, n, 0), t.q1_at(g, n, 1));
  const double l0 = learning_rate(t.visits0[g], hp.delta_l);
  t.q0[g] = (1.0 - l0) * t.q0[g] + l0 * bootstrap;
  t.visits0[g] += 1;

  const std::size_t greedy = t.greedy_index();
  if (state.last_greedy && *state.last_greedy == greedy) {
    state.greedy_streak += 1;
  } else {
    state.last_greedy = greedy;
    state.greedy_streak = 1;
  }
}

double epsilon_step(double epsilon, double epsilon0, double delta_epsilon) {
  return std::max(epsilon0, epsilon * delta_epsilon);
}

DecisionRule greedy_configuration(const AgentState& state) {
  const std::size_t g = state.table.greedy_index();
  DecisionRule rule;
  rule.displacement = state.table.grid.values[g];
  rule.guess = {state.table.greedy_guess(g, 0), state.table.greedy_guess(g, 1)};
  return rule;
}

bool check_convergence(const AgentState& state, std::uint64_t threshold) {
  return state.last_greedy.has_value() && state.greedy_streak >= threshold;
}

}  // namespace recal
