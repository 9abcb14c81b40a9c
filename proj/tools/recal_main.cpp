// Command-line front end for the re-calibration simulator. Everything goes
// through the public C API in recal.h; the C++ core stays behind it.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recal.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int exit_code_for(recal_status status) {
  switch (status) {
    case RECAL_OK:
      return kExitOk;
    case RECAL_ERR_INVALID_ARGUMENT:
    case RECAL_ERR_PARSE:
    case RECAL_ERR_VALIDATION:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

int fail(recal_status status) {
  std::fprintf(stderr, "error (%s): %s\n", recal_status_name(status),
               recal_last_error());
  return exit_code_for(status);
}

struct ScenarioHandle {
  recal_scenario* ptr = nullptr;
  ~ScenarioHandle() { recal_scenario_free(ptr); }
};

struct TraceHandle {
  recal_trace* ptr = nullptr;
  ~TraceHandle() { recal_trace_free(ptr); }
};

struct BatchHandle {
  recal_batch* ptr = nullptr;
  ~BatchHandle() { recal_batch_free(ptr); }
};

// "0:25" -> [0, 25); "3,5,8" -> {3, 5, 8}; "7" -> {7}.
bool parse_seeds(const std::string& spec, std::vector<uint64_t>& seeds) {
  try {
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
      const uint64_t lo = std::stoull(spec.substr(0, colon));
      const uint64_t hi = std::stoull(spec.substr(colon + 1));
      if (hi <= lo) return false;
      for (uint64_t s = lo; s < hi; ++s) seeds.push_back(s);
      return true;
    }
    std::size_t start = 0;
    while (start <= spec.size()) {
      const auto comma = spec.find(',', start);
      const std::string item =
          spec.substr(start, comma == std::string::npos ? std::string::npos
                                                        : comma - start);
      if (item.empty()) return false;
      seeds.push_back(std::stoull(item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return !seeds.empty();
  } catch (const std::exception&) {
    return false;
  }
}

recal_mode mode_from(const std::string& name) {
  return name == "baseline" ? RECAL_MODE_BASELINE : RECAL_MODE_PROPOSED;
}

int cmd_run(const std::string& scenario_path, uint64_t seed,
            const std::string& mode, const std::string& out_dir,
            const std::string& format, uint64_t window) {
  ScenarioHandle scenario;
  if (recal_status s = recal_scenario_load(scenario_path.c_str(), &scenario.ptr))
    return fail(s);
  TraceHandle trace;
  if (recal_status s =
          recal_run(scenario.ptr, seed, mode_from(mode), &trace.ptr))
    return fail(s);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::filesystem::path dir(out_dir);
  const bool jsonl = format != "csv";
  const std::filesystem::path trace_path =
      dir / (jsonl ? "trace.jsonl" : "trace.csv");
  if (recal_status s = recal_trace_write(
          trace.ptr, trace_path.string().c_str(),
          jsonl ? RECAL_FORMAT_JSONL : RECAL_FORMAT_CSV))
    return fail(s);
  if (recal_status s = recal_trace_write_curve(
          trace.ptr, (dir / "curve.csv").string().c_str(), window))
    return fail(s);
  if (recal_status s = recal_trace_write_snapshots(
          trace.ptr, (dir / "snapshots").string().c_str()))
    return fail(s);

  uint64_t count = 0;
  recal_trace_record_count(trace.ptr, &count);
  std::printf("wrote %" PRIu64 " records to %s\n", count,
              trace_path.string().c_str());
  return kExitOk;
}

int cmd_batch(const std::string& scenario_path, const std::string& seed_spec,
              const std::string& mode, const std::string& out_dir) {
  std::vector<uint64_t> seeds;
  if (!parse_seeds(seed_spec, seeds)) {
    std::fprintf(stderr, "error: bad --seeds spec '%s'\n", seed_spec.c_str());
    return kExitValidation;
  }
  ScenarioHandle scenario;
  if (recal_status s = recal_scenario_load(scenario_path.c_str(), &scenario.ptr))
    return fail(s);
  BatchHandle batch;
  if (recal_status s = recal_batch_run(scenario.ptr, seeds.data(), seeds.size(),
                                       mode_from(mode), &batch.ptr))
    return fail(s);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::filesystem::path dir(out_dir);
  if (recal_status s = recal_batch_write(
          batch.ptr, (dir / "per_seed.csv").string().c_str(),
          (dir / "summary.csv").string().c_str()))
    return fail(s);

  double median = 0.0, detected = 0.0;
  recal_batch_median_convergence(batch.ptr, &median);
  recal_batch_fraction_detected(batch.ptr, &detected);
  std::printf("%zu seeds: fraction detected %.3f, median convergence %g\n",
              seeds.size(), detected, median);
  return kExitOk;
}

int cmd_compare(const std::string& scenario_path, const std::string& seed_spec,
                const std::string& out_dir) {
  std::vector<uint64_t> seeds;
  if (!parse_seeds(seed_spec, seeds)) {
    std::fprintf(stderr, "error: bad --seeds spec '%s'\n", seed_spec.c_str());
    return kExitValidation;
  }
  ScenarioHandle scenario;
  if (recal_status s = recal_scenario_load(scenario_path.c_str(), &scenario.ptr))
    return fail(s);

  BatchHandle proposed, baseline;
  if (recal_status s = recal_batch_run(scenario.ptr, seeds.data(), seeds.size(),
                                       RECAL_MODE_PROPOSED, &proposed.ptr))
    return fail(s);
  if (recal_status s = recal_batch_run(scenario.ptr, seeds.data(), seeds.size(),
                                       RECAL_MODE_BASELINE, &baseline.ptr))
    return fail(s);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::filesystem::path dir(out_dir);
  if (recal_status s = recal_batch_write(
          proposed.ptr, (dir / "proposed_per_seed.csv").string().c_str(),
          (dir / "proposed_summary.csv").string().c_str()))
    return fail(s);
  if (recal_status s = recal_batch_write(
          baseline.ptr, (dir / "baseline_per_seed.csv").string().c_str(),
          (dir / "baseline_summary.csv").string().c_str()))
    return fail(s);

  double med_p = 0.0, med_b = 0.0;
  recal_batch_median_convergence(proposed.ptr, &med_p);
  recal_batch_median_convergence(baseline.ptr, &med_b);
  const double ratio = med_b / med_p;

  std::FILE* f = std::fopen((dir / "compare.csv").string().c_str(), "w");
  if (!f) {
    std::fprintf(stderr, "error: cannot write %s\n",
                 (dir / "compare.csv").string().c_str());
    return kExitRuntime;
  }
  std::fprintf(f, "seeds,median_proposed,median_baseline,ratio\n");
  std::fprintf(f, "%zu,%g,%g,%g\n", seeds.size(), med_p, med_b, ratio);
  std::fclose(f);

  std::printf("median convergence: proposed %g, baseline %g, ratio %g\n",
              med_p, med_b, ratio);
  return kExitOk;
}

int cmd_oracle(const std::string& scenario_path, int env_index) {
  ScenarioHandle scenario;
  if (recal_status s = recal_scenario_load(scenario_path.c_str(), &scenario.ptr))
    return fail(s);
  size_t env_count = 0;
  recal_scenario_environment_count(scenario.ptr, &env_count);

  std::printf("env_id,theta_star,score,guess_on_no_click,guess_on_click\n");
  const size_t first = env_index < 0 ? 0 : static_cast<size_t>(env_index);
  const size_t last = env_index < 0 ? env_count : first + 1;
  for (size_t i = first; i < last; ++i) {
    recal_oracle_result result;
    if (recal_status s = recal_oracle(scenario.ptr, i, &result)) return fail(s);
    std::printf("%zu,%.17g,%.17g,%d,%d\n", i, result.theta_star, result.score,
                result.guess_on_no_click, result.guess_on_click);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kennedy receiver automatic re-calibration simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", mode = "proposed";
  std::string format = "jsonl", seed_spec = "0:25";
  uint64_t seed = 0, window = 1000;
  int env_index = -1;

  CLI::App* run_cmd = app.add_subcommand("run", "Execute a single seeded run");
  run_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
  run_cmd->add_option("--seed", seed, "Random seed");
  run_cmd->add_option("--mode", mode, "proposed|baseline")
      ->check(CLI::IsMember({"proposed", "baseline"}));
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--format", format, "Trace format: jsonl|csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  run_cmd->add_option("--window", window, "Learning-curve window");

  CLI::App* batch_cmd =
      app.add_subcommand("batch", "Run a seed range and aggregate");
  batch_cmd->add_option("--scenario", scenario_path, "Scenario file")
      ->required();
  batch_cmd->add_option("--seeds", seed_spec, "Range lo:hi or list a,b,c");
  batch_cmd->add_option("--mode", mode, "proposed|baseline")
      ->check(CLI::IsMember({"proposed", "baseline"}));
  batch_cmd->add_option("--out", out_dir, "Output directory");

  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Proposed vs plain Q-learning on identical seeds");
  compare_cmd->add_option("--scenario", scenario_path, "Scenario file")
      ->required();
  compare_cmd->add_option("--seeds", seed_spec, "Range lo:hi or list a,b,c");
  compare_cmd->add_option("--out", out_dir, "Output directory");

  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "Print the brute-force optimal configuration per environment");
  oracle_cmd->add_option("--scenario", scenario_path, "Scenario file")
      ->required();
  oracle_cmd->add_option("--env", env_index, "Environment id (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitValidation;
  }

  if (run_cmd->parsed())
    return cmd_run(scenario_path, seed, mode, out_dir, format, window);
  if (batch_cmd->parsed())
    return cmd_batch(scenario_path, seed_spec, mode, out_dir);
  if (compare_cmd->parsed())
    return cmd_compare(scenario_path, seed_spec, out_dir);
  if (oracle_cmd->parsed()) return cmd_oracle(scenario_path, env_index);
  return kExitValidation;
}
