#ifndef RECAL_CONTROLLER_HPP
#define RECAL_CONTROLLER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recal/agent.hpp"
#include "recal/effective_model.hpp"
#include "recal/scenario.hpp"
#include "recal/witness.hpp"

namespace recal {

// Calibration cycle: ESTIMATING (theta = 0 intensity estimation) ->
// FINE_TUNING (rewarded Q-learning) -> DEPLOYED (greedy play under witness
// monitoring) -> back to ESTIMATING on an anomaly.
enum class Phase { estimating, fine_tuning, deployed };

std::string_view phase_name(Phase phase);
std::optional<Phase> phase_from_name(std::string_view name);

struct ExperimentRecord {
  std::uint64_t index = 0;
  Phase phase = Phase::estimating;
  double theta = 0.0;
  int n = 0;
  int k = 0;
  int khat = 0;
  int reward = 0;                 // always [khat == k]
  std::optional<double> witness;  // present only while deployed
  double epsilon = 0.0;           // exploration level used this experiment
  double greedy_theta = 0.0;      // greedy displacement after this experiment
  std::uint32_t env_id = 0;       // 0 initial, i after the i-th change

  bool operator==(const ExperimentRecord&) const = default;
};

struct QTableSnapshot {
  std::uint64_t index = 0;  // experiment index the snapshot was taken at
  std::string label;        // initial / fine_tuning / deployed_* / estimating / final
  QTable table;
};

struct RunTrace {
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::vector<ExperimentRecord> records;
  std::vector<QTableSnapshot> snapshots;
};

enum class RunMode { proposed, baseline };

// Phase machine for one run. The baseline mode skips the estimating phase
// entirely: fine-tuning starts from a uniform table and recalibration resets
// it, with the plain Q-learning hyperparameter column applied on top of the
// shared fields of `hp`.
class Controller {
 public:
  Controller(const Scenario& scenario, const Hyperparameters& hp, RunMode mode,
             std::uint64_t seed);

  bool done() const { return cursor_ >= scenario_.total_experiments; }

  // Run one experiment; throws std::out_of_range past total_experiments.
  ExperimentRecord step();

  Phase phase() const { return phase_; }
  const AgentState& agent() const { return agent_; }
  const Hyperparameters& hyperparameters() const { return hp_; }
  const std::vector<QTableSnapshot>& snapshots() const { return snapshots_; }
  std::optional<IntensityEstimate> last_estimate() const { return estimate_; }

 private:
  void enter_estimating();
  void enter_fine_tuning();
  void enter_deployed();
  void snapshot(const std::string& label);

  const Scenario& scenario_;
  Hyperparameters hp_;
  RunMode mode_;
  Rng rng_;
  AgentState agent_;
  WitnessState witness_;
  Phase phase_ = Phase::estimating;
  std::uint64_t phase_step_ = 0;
  std::uint64_t zero_count_ = 0;  // no-click outcomes this estimating round
  std::uint64_t zero_total_ = 0;
  std::uint64_t cursor_ = 0;
  std::uint32_t env_id_ = 0;
  std::size_t next_change_ = 0;
  std::optional<IntensityEstimate> estimate_;
  std::vector<QTableSnapshot> snapshots_;
};

// Full runs; bit-reproducible for a fixed seed.
RunTrace run(const Scenario& scenario, const Hyperparameters& hp,
             std::uint64_t seed);
RunTrace run_baseline(const Scenario& scenario, const Hyperparameters& hp,
                      std::uint64_t seed);
RunTrace run_mode(const Scenario& scenario, const Hyperparameters& hp,
                  RunMode mode, std::uint64_t seed);

}  // namespace recal

#endif
