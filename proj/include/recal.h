#ifndef RECAL_H
#define RECAL_H

/*
 * C API for the Kennedy-receiver re-calibration simulator.
 *
 * All entry points return a recal_status; any non-zero status leaves a
 * human-readable message retrievable through recal_last_error() on the
 * calling thread. Objects are created behind opaque handles and must be
 * released with the matching *_free function.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum recal_status {
  RECAL_OK = 0,
  RECAL_ERR_INVALID_ARGUMENT = 1, /* null handle, bad index, bad parameter */
  RECAL_ERR_PARSE = 2,            /* input file is not well formed */
  RECAL_ERR_VALIDATION = 3,       /* parsed input violates a documented bound */
  RECAL_ERR_IO = 4,               /* file could not be read or written */
  RECAL_ERR_RUNTIME = 5           /* anything else */
} recal_status;

typedef enum recal_mode {
  RECAL_MODE_PROPOSED = 0, /* effective-model seeding + Q-learning */
  RECAL_MODE_BASELINE = 1  /* plain Q-learning, uniform initialization */
} recal_mode;

typedef enum recal_trace_format {
  RECAL_FORMAT_JSONL = 0,
  RECAL_FORMAT_CSV = 1
} recal_trace_format;

typedef enum recal_phase {
  RECAL_PHASE_ESTIMATING = 0,
  RECAL_PHASE_FINE_TUNING = 1,
  RECAL_PHASE_DEPLOYED = 2
} recal_phase;

typedef struct recal_scenario recal_scenario;
typedef struct recal_trace recal_trace;
typedef struct recal_batch recal_batch;

/* Message for the most recent failure on this thread; never NULL. */
const char* recal_last_error(void);
const char* recal_status_name(recal_status status);

/* ---- scenarios ---------------------------------------------------- */

/* Load and validate a scenario file; on success *out owns the scenario. */
recal_status recal_scenario_load(const char* path, recal_scenario** out);

/* Same, from an in-memory JSON document. `id` may be NULL. */
recal_status recal_scenario_load_string(const char* text, const char* id,
                                        recal_scenario** out);

void recal_scenario_free(recal_scenario* scenario);

recal_status recal_scenario_id(const recal_scenario* scenario,
                               const char** out);
recal_status recal_scenario_total_experiments(const recal_scenario* scenario,
                                              uint64_t* out);
recal_status recal_scenario_grid_size(const recal_scenario* scenario,
                                      size_t* out);
recal_status recal_scenario_environment_count(const recal_scenario* scenario,
                                              size_t* out);

/* Brute-force optimum of environment `env_index` (0 = initial, i = the
 * environment installed by the i-th scheduled change) over the grid. */
typedef struct recal_oracle_result {
  double theta_star;
  double score;
  int32_t guess_on_no_click; /* khat for n = 0 */
  int32_t guess_on_click;    /* khat for n = 1 */
} recal_oracle_result;

recal_status recal_oracle(const recal_scenario* scenario, size_t env_index,
                          recal_oracle_result* out);

/* ---- single runs --------------------------------------------------- */

typedef struct recal_record {
  uint64_t index;
  int32_t phase; /* recal_phase */
  double theta;
  int32_t n;
  int32_t k;
  int32_t khat;
  int32_t reward;
  int32_t has_witness; /* witness is meaningful only while deployed */
  double witness;
  double epsilon;
  double greedy_theta;
  uint32_t env_id;
} recal_record;

/* Execute one seeded run; bit-reproducible for a fixed seed. */
recal_status recal_run(const recal_scenario* scenario, uint64_t seed,
                       recal_mode mode, recal_trace** out);

void recal_trace_free(recal_trace* trace);

recal_status recal_trace_record_count(const recal_trace* trace, uint64_t* out);
recal_status recal_trace_record(const recal_trace* trace, uint64_t index,
                                recal_record* out);

/* Trace records in the given format (JSONL carries a one-line header with
 * scenario id and seed). */
recal_status recal_trace_write(const recal_trace* trace, const char* path,
                               recal_trace_format format);

/* Trailing-window learning curve with the aligned witness column. */
recal_status recal_trace_write_curve(const recal_trace* trace,
                                     const char* path, uint64_t window);

/* Q-table snapshots (phase transitions, run end) as CSV tables under dir. */
recal_status recal_trace_write_snapshots(const recal_trace* trace,
                                         const char* dir);

/* ---- batches -------------------------------------------------------- */

typedef struct recal_seed_stats {
  uint64_t seed;
  int32_t detected;
  uint64_t detection_latency; /* valid when detected */
  int32_t converged;
  uint64_t convergence_count; /* valid when converged */
  int32_t reached_optimal;
  uint64_t reached_optimal_after; /* valid when reached_optimal */
  double final_greedy_theta;
  double final_true_score;
  double final_plateau;
} recal_seed_stats;

recal_status recal_batch_run(const recal_scenario* scenario,
                             const uint64_t* seeds, size_t count,
                             recal_mode mode, recal_batch** out);

void recal_batch_free(recal_batch* batch);

recal_status recal_batch_seed_count(const recal_batch* batch, size_t* out);
recal_status recal_batch_seed_stats(const recal_batch* batch, size_t index,
                                    recal_seed_stats* out);
/* Median over per-seed convergence counts; +infinity when the majority of
 * runs never satisfied the check-jump criterion. */
recal_status recal_batch_median_convergence(const recal_batch* batch,
                                            double* out);
recal_status recal_batch_fraction_detected(const recal_batch* batch,
                                           double* out);

/* Per-seed table and one-line aggregate table. Either path may be NULL to
 * skip that file. */
recal_status recal_batch_write(const recal_batch* batch,
                               const char* per_seed_csv,
                               const char* aggregate_csv);

#ifdef __cplusplus
}
#endif

#endif /* RECAL_H */
