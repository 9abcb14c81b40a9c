#ifndef RECAL_SCENARIO_HPP
#define RECAL_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "recal/agent.hpp"
#include "recal/receiver.hpp"

namespace recal {

struct EnvironmentChange {
  std::uint64_t at_experiment = 0;  // takes effect at the start of this index
  EnvironmentSpec env;
};

// A scripted deployment: initial conditions, scheduled drift events, the
// experiment budget and the displacement grid the agent works on.
struct Scenario {
  std::string id = "scenario";
  EnvironmentSpec initial_env;
  std::vector<EnvironmentChange> changes;  // strictly increasing indices
  std::uint64_t total_experiments = 0;
  DisplacementGrid grid;

  void validate() const;

  // Environment in force at a given experiment index.
  const EnvironmentSpec& environment_at(std::uint64_t index) const;
};

// Parse and validate a scenario file (JSON with named sections:
// hyperparameters, grid, environments, schedule). Unknown keys are rejected;
// omitted sections fall back to documented defaults. Throws parse_error with
// line/column context or validation_error naming the offending field.
std::pair<Scenario, Hyperparameters> load_scenario(
    const std::filesystem::path& path);

// Same, from an in-memory document; `id` is used when the document does not
// carry a scenario_id.
std::pair<Scenario, Hyperparameters> load_scenario_text(const std::string& text,
                                                        const std::string& id);

}  // namespace recal

#endif
