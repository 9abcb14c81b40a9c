#include "recal/controller.hpp"

#include <stdexcept>

namespace recal {

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::estimating: return "estimating";
    case Phase::fine_tuning: return "fine_tuning";
    case Phase::deployed: return "deployed";
  }
  return "unknown";
}

std::optional<Phase> phase_from_name(std::string_view name) {
  if (name == "estimating") return Phase::estimating;
  if (name == "fine_tuning") return Phase::fine_tuning;
  if (name == "deployed") return Phase::deployed;
  return std::nullopt;
}

Controller::Controller(const Scenario& scenario, const Hyperparameters& hp,
                       RunMode mode, std::uint64_t seed)
    : scenario_(scenario),
      hp_(mode == RunMode::baseline ? hp.baseline_variant() : hp),
      mode_(mode),
      rng_(seed),
      agent_{QTable::uniform(scenario.grid)},
      witness_(hp_.n_eff, hp_.delta) {
  hp_.validate();
  if (scenario_.total_experiments > 0) {
    scenario_.validate();
  } else {
    scenario_.initial_env.validate();
    scenario_.grid.validate();
  }
  agent_.epsilon = 1.0;
  phase_ = mode == RunMode::baseline ? Phase::fine_tuning : Phase::estimating;
}

void Controller::snapshot(const std::string& label) {
  snapshots_.push_back({cursor_, label, agent_.table});
}

void Controller::enter_estimating() {
  phase_ = Phase::estimating;
  phase_step_ = 0;
  zero_count_ = 0;
  zero_total_ = 0;
  agent_.epsilon = 1.0;
  snapshot("estimating");
}

void Controller::enter_fine_tuning() {
  phase_ = Phase::fine_tuning;
  phase_step_ = 0;
  snapshot("fine_tuning");
}

void Controller::enter_deployed() {
  phase_ = Phase::deployed;
  phase_step_ = 0;
  witness_ = WitnessState(hp_.n_eff, hp_.delta);
}

ExperimentRecord Controller::step() {
  if (done()) throw std::out_of_range("step: past total_experiments");
  if (cursor_ == 0) snapshot("initial");

  while (next_change_ < scenario_.changes.size() &&
         scenario_.changes[next_change_].at_experiment == cursor_) {
    ++next_change_;
    env_id_ = static_cast<std::uint32_t>(next_change_);
  }
  const EnvironmentSpec& env = next_change_ == 0
                                   ? scenario_.initial_env
                                   : scenario_.changes[next_change_ - 1].env;

  ExperimentRecord record;
  record.index = cursor_;
  record.phase = phase_;
  record.env_id = env_id_;
  record.epsilon = agent_.epsilon;

  switch (phase_) {
    case Phase::estimating: {
      record.theta = 0.0;
      const ExperimentOutcome outcome = sample_experiment(env, 0.0, rng_);
      zero_total_ += 1;
      if (outcome.n == 0) zero_count_ += 1;
      const std::size_t zi = agent_.table.grid.zero_index();
      record.n = outcome.n;
      record.k = outcome.k;
      record.khat = agent_.table.greedy_guess(zi, outcome.n);
      record.reward = record.khat == outcome.k ? 1 : 0;
      phase_step_ += 1;
      if (phase_step_ == hp_.n_eff) {
        estimate_ = estimate_intensity(zero_count_, zero_total_);
        agent_.table = seed_qtable(*estimate_, scenario_.grid);
        agent_.epsilon = 1.0;
        agent_.reset_streak();
        enter_fine_tuning();
      }
      break;
    }
    case Phase::fine_tuning: {
      const std::size_t gi = select_displacement(agent_, hp_, rng_);
      record.theta = agent_.table.grid.values[gi];
      const ExperimentOutcome outcome =
          sample_experiment(env, record.theta, rng_);
      record.n = outcome.n;
      record.k = outcome.k;
      record.khat = select_guess(agent_, gi, outcome.n, hp_, rng_);
      record.reward = record.khat == outcome.k ? 1 : 0;
      update_after_episode(agent_, gi, outcome.n, record.khat, record.reward,
                           hp_);
      agent_.epsilon =
          epsilon_step(agent_.epsilon, hp_.epsilon0, hp_.delta_epsilon);
      phase_step_ += 1;
      if (check_convergence(agent_, hp_.check_jump_threshold)) {
        enter_deployed();
        snapshot("deployed_converged");
      } else if (phase_step_ == hp_.n_rl) {
        enter_deployed();
        snapshot("deployed_budget");
      }
      break;
    }
    case Phase::deployed: {
      const DecisionRule rule = greedy_configuration(agent_);
      record.theta = rule.displacement;
      const ExperimentOutcome outcome =
          sample_experiment(env, rule.displacement, rng_);
      record.n = outcome.n;
      record.k = outcome.k;
      record.khat = rule.guess[static_cast<std::size_t>(outcome.n)];
      record.reward = record.khat == outcome.k ? 1 : 0;
      const std::optional<WitnessVerdict> verdict =
          witness_.push_outcome(outcome.n);
      record.witness = witness_.witness_value();
      phase_step_ += 1;
      if (verdict && *verdict == WitnessVerdict::anomaly) {
        if (mode_ == RunMode::proposed) {
          enter_estimating();
        } else {
          agent_.table = QTable::uniform(scenario_.grid);
          agent_.epsilon = 1.0;
          agent_.reset_streak();
          enter_fine_tuning();
        }
      }
      break;
    }
  }

  record.greedy_theta =
      agent_.table.grid.values[agent_.table.greedy_index()];
  cursor_ += 1;
  return record;
}

RunTrace run_mode(const Scenario& scenario, const Hyperparameters& hp,
                  RunMode mode, std::uint64_t seed) {
  Controller controller(scenario, hp, mode, seed);
  RunTrace trace;
  trace.scenario_id = scenario.id;
  trace.seed = seed;
  trace.records.reserve(scenario.total_experiments);
  while (!controller.done()) trace.records.push_back(controller.step());
  trace.snapshots = controller.snapshots();
  if (!trace.records.empty())
    trace.snapshots.push_back(
        {trace.records.back().index, "final", controller.agent().table});
  return trace;
}

RunTrace run(const Scenario& scenario, const Hyperparameters& hp,
             std::uint64_t seed) {
  return run_mode(scenario, hp, RunMode::proposed, seed);
}

RunTrace run_baseline(const Scenario& scenario, const Hyperparameters& hp,
                      std::uint64_t seed) {
  return run_mode(scenario, hp, RunMode::baseline, seed);
}

}  // namespace recal
