#include "recal/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "recal/error.hpp"

namespace recal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

std::string escape_json(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

void append_record_json(std::string& line, const ExperimentRecord& r) {
  line += "{\"index\":";
  line += std::to_string(r.index);
  line += ",\"phase\":\"";
  line += phase_name(r.phase);
  line += "\",\"theta\":";
  line += format_double(r.theta);
  line += ",\"n\":";
  line += std::to_string(r.n);
  line += ",\"k\":";
  line += std::to_string(r.k);
  line += ",\"khat\":";
  line += std::to_string(r.khat);
  line += ",\"reward\":";
  line += std::to_string(r.reward);
  line += ",\"witness\":";
  line += r.witness ? format_double(*r.witness) : "null";
  line += ",\"epsilon\":";
  line += format_double(r.epsilon);
  line += ",\"greedy_theta\":";
  line += format_double(r.greedy_theta);
  line += ",\"env_id\":";
  line += std::to_string(r.env_id);
  line += "}";
}

double median_of(std::vector<double> values) {
  if (values.empty()) return kInf;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile_of(std::vector<double> values, double q) {
  if (values.empty()) return kInf;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (std::isinf(values[lo]) || std::isinf(values[hi])) return kInf;
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> convergence_values(const BatchSummary& s) {
  std::vector<double> v;
  v.reserve(s.per_seed.size());
  for (const SeedOutcome& o : s.per_seed)
    v.push_back(o.convergence_count ? static_cast<double>(*o.convergence_count)
                                    : kInf);
  return v;
}

SeedOutcome analyze_trace(const RunTrace& trace, const Scenario& scenario,
                          std::uint64_t reference, double optimal_theta) {
  SeedOutcome out;
  out.seed = trace.seed;
  const auto& records = trace.records;

  // First anomaly at or after the reference change: the deployed experiment
  // whose completed witness window triggered the phase switch.
  std::optional<std::uint64_t> anomaly_index;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    if (records[i].index < reference) continue;
    if (records[i].phase == Phase::deployed &&
        records[i + 1].phase != Phase::deployed) {
      anomaly_index = records[i].index;
      break;
    }
  }
  if (anomaly_index) out.detection_latency = *anomaly_index - reference;

  for (const QTableSnapshot& snap : trace.snapshots) {
    if (snap.label == "deployed_converged" && snap.index >= reference) {
      out.convergence_count = snap.index - reference;
      break;
    }
  }

  // Optimal-configuration clock starts when recalibration starts; with no
  // change (or no detection in a change-free run) it starts at the reference.
  const std::uint64_t recal_start =
      anomaly_index ? *anomaly_index : reference;
  if (anomaly_index || scenario.changes.empty()) {
    std::optional<std::uint64_t> first_hit;
    std::optional<std::uint64_t> last_miss;
    for (const ExperimentRecord& r : records) {
      if (r.index < recal_start) continue;
      if (r.greedy_theta == optimal_theta) {
        if (!first_hit) first_hit = r.index;
      } else {
        last_miss = r.index;
      }
    }
    if (first_hit) out.reached_optimal = *first_hit - recal_start;
    if (!records.empty() && records.back().greedy_theta == optimal_theta)
      out.settled_optimal =
          last_miss ? *last_miss + 1 - recal_start : 0;
  }

  if (!trace.snapshots.empty() && trace.snapshots.back().label == "final") {
    const AgentState state{trace.snapshots.back().table};
    const DecisionRule rule = greedy_configuration(state);
    out.final_greedy_theta = rule.displacement;
    out.final_guess0 = rule.guess[0];
    out.final_guess1 = rule.guess[1];
    out.final_true_score = true_score(
        scenario.environment_at(scenario.total_experiments - 1), rule);
  }
  if (!records.empty()) {
    const std::size_t window = static_cast<std::size_t>(
        std::min<std::uint64_t>(kPlateauWindow, records.size()));
    double sum = 0.0;
    for (std::size_t i = records.size() - window; i < records.size(); ++i)
      sum += records[i].reward;
    out.final_plateau = sum / static_cast<double>(window);
  }
  return out;
}

}  // namespace

std::vector<CurvePoint> learning_curve(const RunTrace& trace,
                                       std::uint64_t window) {
  if (window < 1) throw std::invalid_argument("learning_curve: window < 1");
  std::vector<CurvePoint> curve;
  if (trace.records.size() < window) return curve;
  curve.reserve(trace.records.size() - window + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    sum += trace.records[i].reward;
    if (i + 1 > window) sum -= trace.records[i - window].reward;
    if (i + 1 >= window)
      curve.push_back({trace.records[i].index,
                       sum / static_cast<double>(window)});
  }
  return curve;
}

double BatchSummary::fraction_detected() const {
  if (per_seed.empty()) return 0.0;
  std::size_t n = 0;
  for (const SeedOutcome& o : per_seed) n += o.detection_latency.has_value();
  return static_cast<double>(n) / static_cast<double>(per_seed.size());
}

double BatchSummary::fraction_converged_within(std::uint64_t budget) const {
  if (per_seed.empty()) return 0.0;
  std::size_t n = 0;
  for (const SeedOutcome& o : per_seed)
    n += o.convergence_count && *o.convergence_count <= budget;
  return static_cast<double>(n) / static_cast<double>(per_seed.size());
}

double BatchSummary::median_convergence() const {
  return median_of(convergence_values(*this));
}

double BatchSummary::quantile_convergence(double q) const {
  return quantile_of(convergence_values(*this), q);
}

double BatchSummary::median_detection() const {
  std::vector<double> v;
  for (const SeedOutcome& o : per_seed)
    v.push_back(o.detection_latency ? static_cast<double>(*o.detection_latency)
                                    : kInf);
  return median_of(v);
}

BatchSummary run_batch(const Scenario& scenario, const Hyperparameters& hp,
                       std::span<const std::uint64_t> seeds, RunMode mode) {
  if (seeds.empty()) throw std::invalid_argument("run_batch: empty seed list");
  BatchSummary summary;
  summary.scenario_id = scenario.id;
  summary.mode = mode;
  summary.reference_index =
      scenario.changes.empty() ? 0 : scenario.changes.front().at_experiment;
  const EnvironmentSpec& env_after =
      scenario.environment_at(summary.reference_index);
  const auto [rule, score] = optimal_configuration(env_after, scenario.grid);
  summary.optimal_theta = rule.displacement;
  summary.optimal_score = score;

  for (std::uint64_t seed : seeds) {
    try {
      const RunTrace trace = run_mode(scenario, hp, mode, seed);
      summary.per_seed.push_back(analyze_trace(trace, scenario,
                                               summary.reference_index,
                                               summary.optimal_theta));
    } catch (const std::exception& e) {
      throw std::runtime_error("seed " + std::to_string(seed) + ": " +
                               e.what());
    }
  }
  std::sort(summary.per_seed.begin(), summary.per_seed.end(),
            [](const SeedOutcome& a, const SeedOutcome& b) {
              return a.seed < b.seed;
            });
  return summary;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void emit_trace_jsonl(const RunTrace& trace,
                      const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  std::string line;
  line += "{\"scenario_id\":\"";
  line += escape_json(trace.scenario_id);
  line += "\",\"seed\":";
  line += std::to_string(trace.seed);
  line += "}\n";
  out << line;
  for (const ExperimentRecord& r : trace.records) {
    line.clear();
    append_record_json(line, r);
    line += "\n";
    out << line;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

RunTrace read_trace_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open trace file: " + path.string());
  RunTrace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw parse_error(path.string() + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
    try {
      if (lineno == 1) {
        trace.scenario_id = j.at("scenario_id").get<std::string>();
        trace.seed = j.at("seed").get<std::uint64_t>();
        continue;
      }
      ExperimentRecord r;
      r.index = j.at("index").get<std::uint64_t>();
      const auto phase = phase_from_name(j.at("phase").get<std::string>());
      if (!phase) throw parse_error("unknown phase name");
      r.phase = *phase;
      r.theta = j.at("theta").get<double>();
      r.n = j.at("n").get<int>();
      r.k = j.at("k").get<int>();
      r.khat = j.at("khat").get<int>();
      r.reward = j.at("reward").get<int>();
      if (!j.at("witness").is_null())
        r.witness = j.at("witness").get<double>();
      r.epsilon = j.at("epsilon").get<double>();
      r.greedy_theta = j.at("greedy_theta").get<double>();
      r.env_id = j.at("env_id").get<std::uint32_t>();
      trace.records.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw parse_error(path.string() + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return trace;
}

void emit_trace_csv(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "index,phase,theta,n,k,khat,reward,witness,epsilon,greedy_theta,"
         "env_id\n";
  for (const ExperimentRecord& r : trace.records) {
    out << r.index << ',' << phase_name(r.phase) << ','
        << format_double(r.theta) << ',' << r.n << ',' << r.k << ',' << r.khat
        << ',' << r.reward << ','
        << (r.witness ? format_double(*r.witness) : "") << ','
        << format_double(r.epsilon) << ',' << format_double(r.greedy_theta)
        << ',' << r.env_id << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void emit_curve_csv(const RunTrace& trace, std::uint64_t window,
                    const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "index,mean_reward,witness\n";
  const std::vector<CurvePoint> curve = learning_curve(trace, window);
  const std::size_t offset = static_cast<std::size_t>(window - 1);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const ExperimentRecord& r = trace.records[offset + i];
    out << curve[i].index << ',' << format_double(curve[i].mean_reward) << ','
        << (r.witness ? format_double(*r.witness) : "") << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void emit_qtable_csv(const QTable& table, const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "theta,q0,q1_00,q1_01,q1_10,q1_11\n";
  for (std::size_t g = 0; g < table.grid.size(); ++g) {
    out << format_double(table.grid.values[g]) << ','
        << format_double(table.q0[g]) << ',' << format_double(table.q1_at(g, 0, 0))
        << ',' << format_double(table.q1_at(g, 0, 1)) << ','
        << format_double(table.q1_at(g, 1, 0)) << ','
        << format_double(table.q1_at(g, 1, 1)) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void emit_snapshots_csv(const RunTrace& trace,
                        const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    const QTableSnapshot& snap = trace.snapshots[i];
    std::ostringstream name;
    name.width(3);
    name.fill('0');
    name << i;
    emit_qtable_csv(snap.table, directory / (name.str() + "_" + snap.label +
                                             "_" + std::to_string(snap.index) +
                                             ".csv"));
  }
}

namespace {

std::string opt_to_csv(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

}  // namespace

void emit_batch_csv(const BatchSummary& summary,
                    const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "seed,detected,detection_latency,converged,convergence_count,"
         "reached_optimal,settled_optimal,final_greedy_theta,final_guess0,"
         "final_guess1,final_true_score,final_plateau\n";
  for (const SeedOutcome& o : summary.per_seed) {
    out << o.seed << ',' << (o.detection_latency ? 1 : 0) << ','
        << opt_to_csv(o.detection_latency) << ','
        << (o.convergence_count ? 1 : 0) << ','
        << opt_to_csv(o.convergence_count) << ','
        << opt_to_csv(o.reached_optimal) << ','
        << opt_to_csv(o.settled_optimal) << ','
        << format_double(o.final_greedy_theta) << ',' << o.final_guess0 << ','
        << o.final_guess1 << ',' << format_double(o.final_true_score) << ','
        << format_double(o.final_plateau) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void emit_batch_aggregate_csv(const BatchSummary& summary,
                              const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "scenario_id,mode,seeds,reference_index,optimal_theta,optimal_score,"
         "fraction_detected,median_detection,median_convergence,"
         "q25_convergence,q75_convergence\n";
  out << summary.scenario_id << ','
      << (summary.mode == RunMode::proposed ? "proposed" : "baseline") << ','
      << summary.per_seed.size() << ',' << summary.reference_index << ','
      << format_double(summary.optimal_theta) << ','
      << format_double(summary.optimal_score) << ','
      << format_double(summary.fraction_detected()) << ','
      << format_double(summary.median_detection()) << ','
      << format_double(summary.median_convergence()) << ','
      << format_double(summary.quantile_convergence(0.25)) << ','
      << format_double(summary.quantile_convergence(0.75)) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace recal
