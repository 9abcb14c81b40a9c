#include "recal/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "recal/error.hpp"

namespace recal {

namespace {

void fail(const std::string& field, double value, const std::string& bound) {
  std::ostringstream os;
  os << field << ": " << value << " out of range " << bound;
  throw validation_error(os.str());
}

}  // namespace

EnvironmentSpec EnvironmentSpec::make(double intensity, double prior_bias,
                                      double displacement_gain) {
  EnvironmentSpec env;
  env.intensity = intensity;
  env.amplitude = std::sqrt(intensity);
  env.prior_bias = prior_bias;
  env.displacement_gain = displacement_gain;
  env.validate();
  return env;
}

void EnvironmentSpec::validate() const {
  if (!(intensity >= 0.0) || !std::isfinite(intensity))
    fail("intensity", intensity, "[0, inf)");
  if (!(prior_bias >= -0.5 && prior_bias <= 0.5))
    fail("prior_bias", prior_bias, "[-0.5, 0.5]");
  if (!(displacement_gain > 0.0) || !std::isfinite(displacement_gain))
    fail("displacement_gain", displacement_gain, "(0, inf)");
  if (std::abs(amplitude * amplitude - intensity) >
      8 * std::numeric_limits<double>::epsilon() * std::max(1.0, intensity))
    fail("amplitude", amplitude, "sqrt(intensity)");
}

DisplacementGrid DisplacementGrid::uniform(double lo, double hi,
                                           std::size_t points) {
  DisplacementGrid grid;
  if (points < 2) throw validation_error("grid.points: need at least 2");
  grid.values.reserve(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    double v = lo + step * static_cast<double>(i);
    // Symmetric ranges should hit zero exactly, not within round-off.
    if (std::abs(v) < step * 1e-9) v = 0.0;
    grid.values.push_back(v);
  }
  grid.validate();
  return grid;
}

std::size_t DisplacementGrid::zero_index() const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == 0.0) return i;
  throw validation_error("grid.values: must contain 0");
}

double DisplacementGrid::step() const {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < values.size(); ++i)
    s = std::min(s, values[i] - values[i - 1]);
  return s;
}

void DisplacementGrid::validate() const {
  if (values.size() < 2) throw validation_error("grid.values: need at least 2 points");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1]))
      throw validation_error("grid.values: must be sorted and distinct");
  for (double v : values)
    if (!std::isfinite(v)) throw validation_error("grid.values: not finite");
  zero_index();  // throws when 0 is missing
}

double click_probability(int k, double theta, const EnvironmentSpec& env) {
  const double sign = (k == 0) ? 1.0 : -1.0;
  const double amp = sign * env.amplitude + env.displacement_gain * theta;
  return -std::expm1(-amp * amp);
}

ExperimentOutcome sample_experiment(const EnvironmentSpec& env, double theta,
                                    Rng& rng) {
  ExperimentOutcome out;
  out.k = rng.bernoulli(env.prior(1)) ? 1 : 0;
  out.n = rng.bernoulli(click_probability(out.k, theta, env)) ? 1 : 0;
  return out;
}

double true_score(const EnvironmentSpec& env, const DecisionRule& rule) {
  double score = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double p_click = click_probability(k, rule.displacement, env);
    const double pn[2] = {1.0 - p_click, p_click};
    for (int n = 0; n < 2; ++n)
      if (rule.guess[static_cast<std::size_t>(n)] == k)
        score += env.prior(k) * pn[n];
  }
  return score;
}

std::array<int, 2> ml_guess_map(const EnvironmentSpec& env, double theta) {
  std::array<int, 2> guess{0, 0};
  for (int n = 0; n < 2; ++n) {
    double weight[2];
    for (int k = 0; k < 2; ++k) {
      const double p_click = click_probability(k, theta, env);
      weight[k] = env.prior(k) * (n == 1 ? p_click : 1.0 - p_click);
    }
    guess[static_cast<std::size_t>(n)] = weight[0] >= weight[1] ? 0 : 1;
  }
  return guess;
}

std::pair<DecisionRule, double> optimal_configuration(
    const EnvironmentSpec& env, const DisplacementGrid& grid) {
  grid.validate();
  DecisionRule best;
  double best_score = -1.0;
  for (double theta : grid.values) {
    DecisionRule rule;
    rule.displacement = theta;
    rule.guess = ml_guess_map(env, theta);
    const double score = true_score(env, rule);
    if (score > best_score) {
      best_score = score;
      best = rule;
    }
  }
  return {best, best_score};
}

}  // namespace recal
