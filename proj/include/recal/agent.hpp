#ifndef RECAL_AGENT_HPP
#define RECAL_AGENT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "recal/receiver.hpp"
#include "recal/rng.hpp"

namespace recal {

// Tabular value estimates over the displacement grid.
//
// q0[g] values the two-step episode started by choosing grid point g.
// q1 values the terminal guess khat after observing outcome n at grid point
// g; entries are laid out as q1[4*g + 2*n + khat]. Visit counts drive the
// per-entry learning-rate schedule.
struct QTable {
  DisplacementGrid grid;
  std::vector<double> q0;
  std::vector<double> q1;
  std::vector<std::uint64_t> visits0;
  std::vector<std::uint64_t> visits1;

  static QTable uniform(DisplacementGrid grid, double value = 0.5);

  static std::size_t q1_index(std::size_t g, int n, int khat) {
    return 4 * g + 2 * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(khat);
  }
  double q1_at(std::size_t g, int n, int khat) const {
    return q1[q1_index(g, n, khat)];
  }

  std::size_t greedy_index() const;               // argmax q0, ties -> lowest
  int greedy_guess(std::size_t g, int n) const;   // argmax khat, ties -> 0

  bool operator==(const QTable&) const = default;
};

// The parameter bundle of the re-calibration method.
struct Hyperparameters {
  std::uint64_t n_eff = 1000;    // estimation experiments / witness window
  std::uint64_t n_rl = 50000;    // fine-tuning budget per calibration round
  double delta = 0.1;            // witness recalibration threshold
  double epsilon0 = 0.05;        // exploration floor
  double delta_epsilon = 0.9;    // exploration decay per experiment
  double delta_weight = 50.0;    // exploration sharpness around the greedy arm
  double delta_l = 150.0;        // learning-rate offset (effective-model trust)
  double gamma = 1.0;            // backup discount
  std::uint64_t check_jump_threshold = 3000;  // greedy streak = convergence

  void validate() const;

  // Plain Q-learning column: uniform exploration, unit learning-rate offset,
  // higher exploration floor with a much slower decay.
  Hyperparameters baseline_variant() const;
};

// Mutable per-run agent: table, exploration level and the greedy streak the
// convergence check looks at.
struct AgentState {
  QTable table;
  double epsilon = 1.0;
  std::optional<std::size_t> last_greedy;
  std::uint64_t greedy_streak = 0;

  void reset_streak() {
    last_greedy.reset();
    greedy_streak = 0;
  }
};

// Normalized sampling distribution p(a) ~ exp(-delta_weight * (qmax - q_a)^2).
std::vector<double> exploration_weights(std::span<const double> values,
                                        double delta_weight);

// Sample an index from the weighted-exploration distribution.
std::size_t weighted_exploration(std::span<const double> values,
                                 double delta_weight, Rng& rng);

// Epsilon-greedy displacement choice over q0.
std::size_t select_displacement(const AgentState& state,
                                const Hyperparameters& hp, Rng& rng);

// Epsilon-greedy guess over q1[g, n, .].
int select_guess(const AgentState& state, std::size_t g, int n,
                 const Hyperparameters& hp, Rng& rng);

double learning_rate(std::uint64_t visit_count, double delta_l);

// One Q-learning episode backup (terminal guess entry first, then the
// displacement entry bootstrapped from the refreshed q1), plus the greedy
// streak update used by check_convergence.
void update_after_episode(AgentState& state, std::size_t g, int n, int khat,
                          int reward, const Hyperparameters& hp);

double epsilon_step(double epsilon, double epsilon0, double delta_epsilon);

DecisionRule greedy_configuration(const AgentState& state);

// True once the greedy grid index held for `threshold` consecutive updates.
bool check_convergence(const AgentState& state, std::uint64_t threshold);

}  // namespace recal

#endif
