#ifndef RECAL_HARNESS_HPP
#define RECAL_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recal/controller.hpp"
#include "recal/scenario.hpp"

namespace recal {

struct CurvePoint {
  std::uint64_t index = 0;
  double mean_reward = 0.0;
};

// Trailing-window mean of rewards, emitted once the window fills.
std::vector<CurvePoint> learning_curve(const RunTrace& trace,
                                       std::uint64_t window);

// Per-seed metrics of a batch run. Indices are measured from the first
// scheduled change (or from experiment 0 when the scenario has none);
// recalibration-relative fields count from the first anomaly at or after it.
struct SeedOutcome {
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> detection_latency;   // first anomaly - change
  std::optional<std::uint64_t> convergence_count;   // check-jump fire - change
  std::optional<std::uint64_t> reached_optimal;     // first greedy == theta*
  std::optional<std::uint64_t> settled_optimal;     // greedy == theta* for good
  double final_greedy_theta = 0.0;
  int final_guess0 = 0;
  int final_guess1 = 0;
  double final_true_score = 0.0;  // oracle score of the final greedy rule
  double final_plateau = 0.0;     // mean reward over the trailing plateau window
};

// Reward window the plateau level is averaged over.
inline constexpr std::uint64_t kPlateauWindow = 5000;

struct BatchSummary {
  std::string scenario_id;
  RunMode mode = RunMode::proposed;
  std::uint64_t reference_index = 0;  // change-point the metrics refer to
  double optimal_theta = 0.0;         // grid optimum after the reference change
  double optimal_score = 0.0;
  std::vector<SeedOutcome> per_seed;  // sorted by seed

  double fraction_detected() const;
  double fraction_converged_within(std::uint64_t budget) const;
  // Median / quantile over convergence counts; runs that never converged
  // enter as +infinity so censoring can only push the statistics up.
  double median_convergence() const;
  double quantile_convergence(double q) const;
  double median_detection() const;
};

// Execute run/run_baseline once per seed and aggregate. Results do not
// depend on the order of `seeds`. Throws std::invalid_argument on an empty
// seed list; per-run failures are rethrown tagged with the seed.
BatchSummary run_batch(const Scenario& scenario, const Hyperparameters& hp,
                       std::span<const std::uint64_t> seeds, RunMode mode);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// Line-delimited trace records (one JSON object per experiment, fixed field
// order) behind a one-line header carrying scenario_id and seed. Snapshots
// are not part of the record stream; emit them separately as tables.
void emit_trace_jsonl(const RunTrace& trace, const std::filesystem::path& path);
RunTrace read_trace_jsonl(const std::filesystem::path& path);

// Same records as a comma-separated table with a header row.
void emit_trace_csv(const RunTrace& trace, const std::filesystem::path& path);

// index,mean_reward,witness with the witness column aligned to the same
// experiment index (blank outside the deployed phase).
void emit_curve_csv(const RunTrace& trace, std::uint64_t window,
                    const std::filesystem::path& path);

// theta,q0,q1_00,q1_01,q1_10,q1_11 rows (q1_nk = outcome n, guess k).
void emit_qtable_csv(const QTable& table, const std::filesystem::path& path);

// One table per snapshot, named <seq>_<label>_<index>.csv under `directory`.
void emit_snapshots_csv(const RunTrace& trace,
                        const std::filesystem::path& directory);

void emit_batch_csv(const BatchSummary& summary,
                    const std::filesystem::path& path);
void emit_batch_aggregate_csv(const BatchSummary& summary,
                              const std::filesystem::path& path);

}  // namespace recal

#endif
