#include "recal/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "recal/error.hpp"

namespace recal {

namespace {

using nlohmann::json;

[[noreturn]] void fail_field(const std::string& field, const std::string& detail) {
  throw validation_error(field + ": " + detail);
}

void reject_unknown_keys(const json& obj, const std::string& section,
                         std::initializer_list<const char*> known) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) ok = true;
    if (!ok) fail_field(section + "." + item.key(), "unknown key");
  }
}

double get_number(const json& obj, const std::string& section, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail_field(section + "." + key, "expected a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& section,
                        const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned())
    fail_field(section + "." + key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

Hyperparameters parse_hyperparameters(const json& root) {
  Hyperparameters hp;
  if (!root.contains("hyperparameters")) return hp;
  const json& h = root.at("hyperparameters");
  if (!h.is_object()) fail_field("hyperparameters", "expected an object");
  reject_unknown_keys(h, "hyperparameters",
                      {"n_eff", "n_rl", "delta", "epsilon0", "delta_epsilon",
                       "delta_weight", "delta_l", "gamma",
                       "check_jump_threshold"});
  const std::string s = "hyperparameters";
  hp.n_eff = get_count(h, s, "n_eff", hp.n_eff);
  hp.n_rl = get_count(h, s, "n_rl", hp.n_rl);
  hp.delta = get_number(h, s, "delta", hp.delta);
  hp.epsilon0 = get_number(h, s, "epsilon0", hp.epsilon0);
  hp.delta_epsilon = get_number(h, s, "delta_epsilon", hp.delta_epsilon);
  hp.delta_weight = get_number(h, s, "delta_weight", hp.delta_weight);
  hp.delta_l = get_number(h, s, "delta_l", hp.delta_l);
  hp.gamma = get_number(h, s, "gamma", hp.gamma);
  hp.check_jump_threshold =
      get_count(h, s, "check_jump_threshold", hp.check_jump_threshold);
  try {
    hp.validate();
  } catch (const validation_error& e) {
    throw validation_error("hyperparameters." + std::string(e.what()));
  }
  return hp;
}

DisplacementGrid parse_grid(const json& root) {
  if (!root.contains("grid"))
    return DisplacementGrid::uniform(-1.5, 1.5, 25);
  const json& g = root.at("grid");
  if (!g.is_object()) fail_field("grid", "expected an object");
  reject_unknown_keys(g, "grid", {"min", "max", "points", "values"});
  try {
    if (g.contains("values")) {
      if (g.contains("min") || g.contains("max") || g.contains("points"))
        fail_field("grid", "give either values or min/max/points, not both");
      if (!g.at("values").is_array()) fail_field("grid.values", "expected an array");
      DisplacementGrid grid;
      for (const json& v : g.at("values")) {
        if (!v.is_number()) fail_field("grid.values", "expected numbers");
        grid.values.push_back(v.get<double>());
      }
      grid.validate();
      return grid;
    }
    const double lo = get_number(g, "grid", "min", -1.5);
    const double hi = get_number(g, "grid", "max", 1.5);
    const std::uint64_t points = get_count(g, "grid", "points", 25);
    return DisplacementGrid::uniform(lo, hi, static_cast<std::size_t>(points));
  } catch (const validation_error& e) {
    std::string what = e.what();
    if (what.rfind("grid", 0) == 0) throw;
    throw validation_error("grid." + what);
  }
}

std::vector<EnvironmentSpec> parse_environments(const json& root) {
  if (!root.contains("environments"))
    fail_field("environments", "required section is missing");
  const json& list = root.at("environments");
  if (!list.is_array() || list.empty())
    fail_field("environments", "expected a non-empty array");
  std::vector<EnvironmentSpec> envs;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string section = "environments[" + std::to_string(i) + "]";
    const json& e = list.at(i);
    if (!e.is_object()) fail_field(section, "expected an object");
    reject_unknown_keys(e, section,
                        {"intensity", "prior_bias", "displacement_gain"});
    if (!e.contains("intensity")) fail_field(section + ".intensity", "required");
    const double intensity = get_number(e, section, "intensity", 0.0);
    const double prior_bias = get_number(e, section, "prior_bias", 0.0);
    const double gain = get_number(e, section, "displacement_gain", 1.0);
    try {
      envs.push_back(EnvironmentSpec::make(intensity, prior_bias, gain));
    } catch (const validation_error& err) {
      throw validation_error(section + "." + std::string(err.what()));
    }
  }
  return envs;
}

void parse_schedule(const json& root, const std::vector<EnvironmentSpec>& envs,
                    Scenario& scenario) {
  scenario.total_experiments = 1000000;
  if (!root.contains("schedule")) return;
  const json& s = root.at("schedule");
  if (!s.is_object()) fail_field("schedule", "expected an object");
  reject_unknown_keys(s, "schedule", {"total_experiments", "changes"});
  scenario.total_experiments =
      get_count(s, "schedule", "total_experiments", scenario.total_experiments);
  if (!s.contains("changes")) return;
  const json& changes = s.at("changes");
  if (!changes.is_array()) fail_field("schedule.changes", "expected an array");
  for (std::size_t i = 0; i < changes.size(); ++i) {
    const std::string section = "schedule.changes[" + std::to_string(i) + "]";
    const json& c = changes.at(i);
    if (!c.is_object()) fail_field(section, "expected an object");
    reject_unknown_keys(c, section, {"at", "environment"});
    if (!c.contains("at") || !c.contains("environment"))
      fail_field(section, "needs both at and environment");
    EnvironmentChange change;
    change.at_experiment = get_count(c, section, "at", 0);
    const std::uint64_t ref = get_count(c, section, "environment", 0);
    if (ref >= envs.size())
      fail_field(section + ".environment",
                 "index " + std::to_string(ref) + " out of range [0, " +
                     std::to_string(envs.size() - 1) + "]");
    change.env = envs[static_cast<std::size_t>(ref)];
    scenario.changes.push_back(change);
  }
}

std::pair<Scenario, Hyperparameters> from_json(const json& root,
                                               const std::string& fallback_id) {
  if (!root.is_object()) fail_field("document", "expected a JSON object");
  reject_unknown_keys(root, "document",
                      {"scenario_id", "hyperparameters", "grid", "environments",
                       "schedule"});
  Scenario scenario;
  scenario.id = fallback_id;
  if (root.contains("scenario_id")) {
    if (!root.at("scenario_id").is_string())
      fail_field("scenario_id", "expected a string");
    scenario.id = root.at("scenario_id").get<std::string>();
  }
  Hyperparameters hp = parse_hyperparameters(root);
  scenario.grid = parse_grid(root);
  const std::vector<EnvironmentSpec> envs = parse_environments(root);
  scenario.initial_env = envs.front();
  parse_schedule(root, envs, scenario);
  scenario.validate();
  return {scenario, hp};
}

[[noreturn]] void rethrow_with_line(const std::string& text,
                                    const json::parse_error& e) {
  // nlohmann reports a byte offset; turn it into line/column for the message.
  std::size_t line = 1, column = 1;
  const std::size_t stop = e.byte == 0 ? 0 : e.byte - 1;
  for (std::size_t i = 0; i < stop && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  std::ostringstream os;
  os << "parse error at line " << line << ", column " << column << ": "
     << e.what();
  throw parse_error(os.str());
}

}  // namespace

void Scenario::validate() const {
  initial_env.validate();
  grid.validate();
  if (total_experiments == 0)
    throw validation_error("schedule.total_experiments: must be > 0");
  std::uint64_t previous = 0;
  bool first = true;
  for (std::size_t i = 0; i < changes.size(); ++i) {
    const std::string field = "schedule.changes[" + std::to_string(i) + "].at";
    if (!first && changes[i].at_experiment <= previous)
      throw validation_error(field + ": indices must be strictly increasing");
    if (changes[i].at_experiment >= total_experiments)
      throw validation_error(field + ": " +
                             std::to_string(changes[i].at_experiment) +
                             " not below total_experiments");
    changes[i].env.validate();
    previous = changes[i].at_experiment;
    first = false;
  }
}

const EnvironmentSpec& Scenario::environment_at(std::uint64_t index) const {
  const EnvironmentSpec* env = &initial_env;
  for (const EnvironmentChange& change : changes) {
    if (change.at_experiment > index) break;
    env = &change.env;
  }
  return *env;
}

std::pair<Scenario, Hyperparameters> load_scenario(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open scenario file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_scenario_text(buffer.str(), path.stem().string());
}

std::pair<Scenario, Hyperparameters> load_scenario_text(
    const std::string& text, const std::string& id) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    rethrow_with_line(text, e);
  }
  return from_json(root, id);
}

}  // namespace recal
