#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "hubsim/collective.hpp"
#include "hubsim/world.hpp"

namespace hubsim {

constexpr int kScenarioVersion = 1;

struct Scenario {
  std::string name{"default"};
  TrialConfig trial;
  ModelParams params;
  VisualizationMode visualization{VisualizationMode::IA};
  // One difficulty per trial component, in presentation order.
  std::vector<Difficulty> components{Difficulty::Easy, Difficulty::Hard};

  // Throws ConfigError on any invalid field.
  void validate() const;
};

// Parses the scenario document. Unknown keys are rejected so typos surface
// before a run starts.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);

Scenario load_scenario(const std::string& path);

// Default parameters for `model`, the given seed, and both components at `difficulty`.
Scenario make_scenario(Model model, std::uint64_t seed, std::optional<Difficulty> difficulty = std::nullopt);

}  // namespace hubsim
