#ifndef RECAL_RECEIVER_HPP
#define RECAL_RECEIVER_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "recal/rng.hpp"

namespace recal {

// Ground-truth deployment conditions, hidden from the calibrating agent.
// The transmitted states are |±alpha> with mean photon number `intensity`;
// `prior_bias` shifts the symbol priors p_k = 1/2 + (-1)^k * prior_bias and
// `displacement_gain` models a faulty displacement stage that applies
// gain * theta instead of theta.
struct EnvironmentSpec {
  double intensity = 0.0;          // |alpha|^2, >= 0
  double amplitude = 0.0;          // alpha = sqrt(intensity), real, >= 0
  double prior_bias = 0.0;         // in [-1/2, 1/2]
  double displacement_gain = 1.0;  // > 0, ideal device: 1

  static EnvironmentSpec make(double intensity, double prior_bias = 0.0,
                              double displacement_gain = 1.0);

  double prior(int k) const {
    return 0.5 + (k == 0 ? prior_bias : -prior_bias);
  }

  // Throws validation_error naming the offending field.
  void validate() const;
};

// Discrete set of candidate displacement values. Sorted, distinct, at least
// two points, and must contain 0 (the calibration stage measures at theta=0).
struct DisplacementGrid {
  std::vector<double> values;

  static DisplacementGrid uniform(double lo, double hi, std::size_t points);

  std::size_t size() const { return values.size(); }
  std::size_t zero_index() const;  // index of the exact 0.0 entry
  double step() const;             // smallest spacing between adjacent points

  void validate() const;

  bool operator==(const DisplacementGrid&) const = default;
};

// One discrimination experiment: transmitted bit k, detector click n.
struct ExperimentOutcome {
  int k = 0;
  int n = 0;
};

// A device configuration: displacement plus the outcome -> guess map.
struct DecisionRule {
  double displacement = 0.0;
  std::array<int, 2> guess{0, 0};  // guess[n] = khat
};

// p(n=1 | k, theta, env) under the Born rule with the faulty gain applied.
double click_probability(int k, double theta, const EnvironmentSpec& env);

// Draw one experiment: k from the priors, n from the click distribution.
ExperimentOutcome sample_experiment(const EnvironmentSpec& env, double theta,
                                    Rng& rng);

// Exact success probability of `rule` under `env`, by enumeration over the
// four (k, n) branches. No sampling.
double true_score(const EnvironmentSpec& env, const DecisionRule& rule);

// Maximum-likelihood guess map at a given displacement (posterior argmax per
// outcome, ties toward khat = 0).
std::array<int, 2> ml_guess_map(const EnvironmentSpec& env, double theta);

// Grid point and ML guess map maximizing true_score, with the achieved score.
// Ties break toward the smaller grid index.
std::pair<DecisionRule, double> optimal_configuration(
    const EnvironmentSpec& env, const DisplacementGrid& grid);

}  // namespace recal

#endif
