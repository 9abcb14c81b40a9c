#include "recal.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "recal/controller.hpp"
#include "recal/error.hpp"
#include "recal/harness.hpp"
#include "recal/scenario.hpp"

struct recal_scenario {
  recal::Scenario scenario;
  recal::Hyperparameters hp;
};

struct recal_trace {
  recal::RunTrace trace;
};

struct recal_batch {
  recal::BatchSummary summary;
};

namespace {

thread_local std::string t_last_error = "ok";

recal_status set_error(recal_status status, const std::string& message) {
  t_last_error = message;
  return status;
}

recal_status from_exception() {
  try {
    throw;
  } catch (const recal::parse_error& e) {
    return set_error(RECAL_ERR_PARSE, e.what());
  } catch (const recal::validation_error& e) {
    return set_error(RECAL_ERR_VALIDATION, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(RECAL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RECAL_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RECAL_ERR_RUNTIME, e.what());
  } catch (...) {
    return set_error(RECAL_ERR_RUNTIME, "unknown error");
  }
}

recal_status require(bool condition, const char* what) {
  if (condition) return RECAL_OK;
  return set_error(RECAL_ERR_INVALID_ARGUMENT, what);
}

}  // namespace

extern "C" {

const char* recal_last_error(void) { return t_last_error.c_str(); }

const char* recal_status_name(recal_status status) {
  switch (status) {
    case RECAL_OK: return "ok";
    case RECAL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RECAL_ERR_PARSE: return "parse error";
    case RECAL_ERR_VALIDATION: return "validation error";
    case RECAL_ERR_IO: return "io error";
    case RECAL_ERR_RUNTIME: return "runtime error";
  }
  return "unknown";
}

recal_status recal_scenario_load(const char* path, recal_scenario** out) {
  if (recal_status s = require(path && out, "recal_scenario_load: null argument"))
    return s;
  *out = nullptr;
  try {
    auto [scenario, hp] = recal::load_scenario(path);
    *out = new recal_scenario{std::move(scenario), hp};
    return RECAL_OK;
  } catch (const recal::parse_error& e) {
    // A missing file surfaces as an open failure; report it as I/O.
    const std::string what = e.what();
    if (what.rfind("cannot open", 0) == 0) return set_error(RECAL_ERR_IO, what);
    return set_error(RECAL_ERR_PARSE, what);
  } catch (...) {
    return from_exception();
  }
}

recal_status recal_scenario_load_string(const char* text, const char* id,
                                        recal_scenario** out) {
  if (recal_status s =
          require(text && out, "recal_scenario_load_string: null argument"))
    return s;
  *out = nullptr;
  try {
    auto [scenario, hp] =
        recal::load_scenario_text(text, id ? id : "scenario");
    *out = new recal_scenario{std::move(scenario), hp};
    return RECAL_OK;
  } catch (...) {
    return from_exception();
  }
}

void recal_scenario_free(recal_scenario* scenario) { delete scenario; }

recal_status recal_scenario_id(const recal_scenario* scenario,
                               const char** out) {
  if (recal_status s = require(scenario && out, "recal_scenario_id: null argument"))
    return s;
  *out = scenario->scenario.id.c_str();
  return RECAL_OK;
}

recal_status recal_scenario_total_experiments(const recal_scenario* scenario,
                                              uint64_t* out) {
  if (recal_status s = require(scenario && out,
                               "recal_scenario_total_experiments: null argument"))
    return s;
  *out = scenario->scenario.total_experiments;
  return RECAL_OK;
}

recal_status recal_scenario_grid_size(const recal_scenario* scenario,
                                      size_t* out) {
  if (recal_status s =
          require(scenario && out, "recal_scenario_grid_size: null argument"))
    return s;
  *out = scenario->scenario.grid.size();
  return RECAL_OK;
}

recal_status recal_scenario_environment_count(const recal_scenario* scenario,
                                              size_t* out) {
  if (recal_status s = require(scenario && out,
                               "recal_scenario_environment_count: null argument"))
    return s;
  *out = scenario->scenario.changes.size() + 1;
  return RECAL_OK;
}

recal_status recal_oracle(const recal_scenario* scenario, size_t env_index,
                          recal_oracle_result* out) {
  if (recal_status s = require(scenario && out, "recal_oracle: null argument"))
    return s;
  const auto& changes = scenario->scenario.changes;
  if (env_index > changes.size())
    return set_error(RECAL_ERR_INVALID_ARGUMENT,
                     "recal_oracle: env_index out of range");
  try {
    const recal::EnvironmentSpec& env =
        env_index == 0 ? scenario->scenario.initial_env
                       : changes[env_index - 1].env;
    const auto [rule, score] =
        recal::optimal_configuration(env, scenario->scenario.grid);
    out->theta_star = rule.displacement;
    out->score = score;
    out->guess_on_no_click = rule.guess[0];
    out->guess_on_click = rule.guess[1];
    return RECAL_OK;
  } catch (...) {
    return from_exception();
  }
}

recal_status recal_run(const recal_scenario* scenario, uint64_t seed,
                       recal_mode mode, recal_trace** out) {
  if (recal_status s = require(scenario && out, "recal_run: null argument"))
    return s;
  if (mode != RECAL_MODE_PROPOSED && mode != RECAL_MODE_BASELINE)
    return set_error(RECAL_ERR_INVALID_ARGUMENT, "recal_run: bad mode");
  *out = nullptr;
  try {
    recal::RunTrace trace = recal::run_mode(
        scenario->scenario, scenario->hp,
        mode == RECAL_MODE_PROPOSED ? recal::RunMode::proposed
                                    : recal::RunMode::baseline,
        seed);
    *out = new recal_trace{std::move(trace)};
    return RECAL_OK;
  } catch (...) {
    return from_exception();
  }
}

void recal_trace_free(recal_trace* trace) { delete trace; }

recal_status recal_trace_record_count(const recal_trace* trace,
                                      uint64_t* out) {
  if (recal_status s =
          require(trace && out, "recal_trace_record_count: null argument"))
    return s;
  *out = trace->trace.records.size();
  return RECAL_OK;
}

recal_status recal_trace_record(const recal_trace* trace, uint64_t index,
                                recal_record* out) {
  if (recal_status s = require(trace && out, "recal_trace_record: null argument"))
    return s;
  if (index >= trace->trace.records.size())
    return set_error(RECAL_ERR_INVALID_ARGUMENT,
                     "recal_trace_record: index out of range");
  const recal::ExperimentRecord& r =
      trace->trace.records[static_cast<std::size_t>(index)];
  out->index = r.index;
  out->phase = static_cast<int32_t>(r.phase);
  out->theta = r.theta;
  out->n = r.n;
  out->k = r.k;
  out->khat = r.khat;
  out->reward = r.reward;
  out->has_witness = r.witness.has_value() ? 1 : 0;
  out->witness = r.witness.value_or(0.0);
  out->epsilon = r.epsilon;
  out->greedy_theta = r.greedy_theta;
  out->env_id = r.env_id;
  return RECAL_OK;
}

recal_status recal_trace_write(const recal_trace* trace, const char* path,
                               recal_trace_format format) {
  if (recal_status s =
          require(trace && path, "recal_trace_write: null argument"))
    return s;
  try {
    if (format == RECAL_FORMAT_JSONL)
      recal::emit_trace_jsonl(trace->trace, path);
    else if (format == RECAL_FORMAT_CSV)
      recal::emit_trace_csv(trace->trace, path);
    else
      return set_error(RECAL_ERR_INVALID_ARGUMENT,
                       "recal_trace_write: bad format");
    return RECAL_OK;
  } catch (const std::runtime_error& e) {
    return set_error(RECAL_ERR_IO, e.what());
  } catch (...) {
    return from_exception();
  }
}

recal_status recal_trace_write_curve(const recal_trace* trace,
                                     const char* path, uint64_t window) {
  if (recal_status s =
          require(trace && path, "recal_trace_write_curve: null argument"))
    return s;
  if (window < 1)
    return set_error(RECAL_ERR_INVALID_ARGUMENT,
                     "recal_trace_write_curve: window < 1");
  try {
    recal::emit_curve_csv(trace->trace, window, path);
    return RECAL_OK;
  } catch (const std::runtime_error& e) {
    return set_error(RECAL_ERR_IO, e.what());
  } catch (...) {
    return from_exception();
  }
}

recal_status recal_trace_write_snapshots(const recal_trace* trace,
                                         const char* dir) {
  if (recal_status s =
          require(trace && dir, "recal_trace_write_snapshots: null argument"))
    return s;
  try {
    recal::emit_snapshots_csv(trace->trace, dir);
    return RECAL_OK;
  } catch (const std::runtime_error& e) {
    return set_error(RECAL_ERR_IO, e.what());
  } catch (...) {
    return from_exception();
  }
}

recal_status recal_batch_run(const recal_scenario* scenario,
                             const uint64_t* seeds, size_t count,
                             recal_mode mode, recal_batch** out) {
  if (recal_status s =
          require(scenario && seeds && out, "recal_batch_run: null argument"))
    return s;
  if (mode != RECAL_MODE_PROPOSED && mode != RECAL_MODE_BASELINE)
    return set_error(RECAL_ERR_INVALID_ARGUMENT, "recal_batch_run: bad mode");
  *out = nullptr;
  try {
    recal::BatchSummary summary = recal::run_batch(
        scenario->scenario, scenario->hp, std::span(seeds, count),
        mode == RECAL_MODE_PROPOSED ? recal::RunMode::proposed
                                    : recal::RunMode::baseline);
    *out = new recal_batch{std::move(summary)};
    return RECAL_OK;
  } catch (...) {
    return from_exception();
  }
}

void recal_batch_free(recal_batch* batch) { delete batch; }

recal_status recal_batch_seed_count(const recal_batch* batch, size_t* out) {
  if (recal_status s =
          require(batch && out, "recal_batch_seed_count: null argument"))
    return s;
  *out = batch->summary.per_seed.size();
  return RECAL_OK;
}

recal_status recal_batch_seed_stats(const recal_batch* batch, size_t index,
                                    recal_seed_stats* out) {
  if (recal_status s =
          require(batch && out, "recal_batch_seed_stats: null argument"))
    return s;
  if (index >= batch->summary.per_seed.size())
    return set_error(RECAL_ERR_INVALID_ARGUMENT,
                     "recal_batch_seed_stats: index out of range");
  const recal::SeedOutcome& o = batch->summary.per_seed[index];
  out->seed = o.seed;
  out->detected = o.detection_latency.has_value();
  out->detection_latency = o.detection_latency.value_or(0);
  out->converged = o.convergence_count.has_value();
  out->convergence_count = o.convergence_count.value_or(0);
  out->reached_optimal = o.reached_optimal.has_value();
  out->reached_optimal_after = o.reached_optimal.value_or(0);
  out->final_greedy_theta = o.final_greedy_theta;
  out->final_true_score = o.final_true_score;
  out->final_plateau = o.final_plateau;
  return RECAL_OK;
}

recal_status recal_batch_median_convergence(const recal_batch* batch,
                                            double* out) {
  if (recal_status s =
          require(batch && out, "recal_batch_median_convergence: null argument"))
    return s;
  *out = batch->summary.median_convergence();
  return RECAL_OK;
}

recal_status recal_batch_fraction_detected(const recal_batch* batch,
                                           double* out) {
  if (recal_status s =
          require(batch && out, "recal_batch_fraction_detected: null argument"))
    return s;
  *out = batch->summary.fraction_detected();
  return RECAL_OK;
}

recal_status recal_batch_write(const recal_batch* batch,
                               const char* per_seed_csv,
                               const char* aggregate_csv) {
  if (recal_status s = require(batch, "recal_batch_write: null argument"))
    return s;
  try {
    if (per_seed_csv) recal::emit_batch_csv(batch->summary, per_seed_csv);
    if (aggregate_csv)
      recal::emit_batch_aggregate_csv(batch->summary, aggregate_csv);
    return RECAL_OK;
  } catch (const std::runtime_error& e) {
    return set_error(RECAL_ERR_IO, e.what());
  } catch (...) {
    return from_exception();
  }
}

}  // extern "C"
