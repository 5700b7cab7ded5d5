#include "hubsim/scenario.hpp"

#include <fstream>
#include <set>

namespace hubsim {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown " + where + " key: " + key);
}

template <typename T>
void read(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for ") + key + ": " + e.what());
  }
}

void read_params(const json& j, ModelParams& p) {
  reject_unknown(j,
                 {"recruit_gain", "reassess_period", "interaction_delay_coeff", "interaction_frequency_mult",
                  "episodic_queuing", "entity_speed", "quorum_commit", "quorum_execute", "value_noise_sigma",
                  "explore_mean", "hub_rest", "detect_radius", "assess_duration", "advocacy_exponent"},
                 "params");
  read(j, "recruit_gain", p.recruit_gain);
  read(j, "reassess_period", p.reassess_period);
  read(j, "interaction_delay_coeff", p.interaction_delay_coeff);
  read(j, "interaction_frequency_mult", p.interaction_frequency_mult);
  read(j, "episodic_queuing", p.episodic_queuing);
  read(j, "entity_speed", p.entity_speed);
  read(j, "quorum_commit", p.quorum_commit);
  read(j, "quorum_execute", p.quorum_execute);
  read(j, "value_noise_sigma", p.value_noise_sigma);
  read(j, "explore_mean", p.explore_mean);
  read(j, "hub_rest", p.hub_rest);
  read(j, "detect_radius", p.detect_radius);
  read(j, "assess_duration", p.assess_duration);
  read(j, "advocacy_exponent", p.advocacy_exponent);
}

void read_trial(const json& j, TrialConfig& t) {
  reject_unknown(j,
                 {"n_targets", "n_collectives", "population", "range", "decisions_per_collective",
                  "component_time_limit", "decision_cap_on_timeout", "p_lost", "max_component_duration",
                  "hub_spacing"},
                 "trial");
  read(j, "n_targets", t.n_targets);
  read(j, "n_collectives", t.n_collectives);
  read(j, "population", t.population);
  read(j, "range", t.range);
  read(j, "decisions_per_collective", t.decisions_per_collective);
  read(j, "component_time_limit", t.component_time_limit);
  read(j, "decision_cap_on_timeout", t.decision_cap_on_timeout);
  read(j, "p_lost", t.p_lost);
  read(j, "max_component_duration", t.max_component_duration);
  read(j, "hub_spacing", t.hub_spacing);
}

}  // namespace

void Scenario::validate() const {
  trial.validate();
  params.validate();
  if (components.empty()) throw ConfigError("scenario needs at least one component");
  if (trial.range != kSearchRange) throw ConfigError("range is fixed at 500 m");
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  reject_unknown(j, {"version", "name", "seed", "model", "difficulty", "components", "visualization", "params", "trial"},
                 "scenario");
  const int version = j.value("version", kScenarioVersion);
  if (version != kScenarioVersion) throw ConfigError("unsupported scenario version " + std::to_string(version));

  Scenario s;
  read(j, "name", s.name);
  try {
    if (j.contains("model")) s.params = ModelParams::defaults_for(parse_model(j.at("model").get<std::string>()));
    if (j.contains("seed")) s.trial.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("difficulty")) {
      const Difficulty d = parse_difficulty(j.at("difficulty").get<std::string>());
      s.components.assign(2, d);
      s.trial.difficulty = d;
    }
    if (j.contains("components")) {
      s.components.clear();
      for (const auto& c : j.at("components")) s.components.push_back(parse_difficulty(c.get<std::string>()));
    }
    if (j.contains("visualization"))
      s.visualization = parse_visualization(j.at("visualization").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
  if (j.contains("params")) read_params(j.at("params"), s.params);
  if (j.contains("trial")) read_trial(j.at("trial"), s.trial);
  if (!s.components.empty()) s.trial.difficulty = s.components.front();
  s.validate();
  return s;
}

json to_json(const Scenario& s) {
  json components = json::array();
  for (auto d : s.components) components.push_back(to_string(d));
  const auto& p = s.params;
  const auto& t = s.trial;
  return {{"version", kScenarioVersion},
          {"name", s.name},
          {"seed", t.seed},
          {"model", to_string(p.model)},
          {"components", components},
          {"visualization", to_string(s.visualization)},
          {"params",
           {{"recruit_gain", p.recruit_gain},
            {"reassess_period", p.reassess_period},
            {"interaction_delay_coeff", p.interaction_delay_coeff},
            {"interaction_frequency_mult", p.interaction_frequency_mult},
            {"episodic_queuing", p.episodic_queuing},
            {"entity_speed", p.entity_speed},
            {"quorum_commit", p.quorum_commit},
            {"quorum_execute", p.quorum_execute},
            {"value_noise_sigma", p.value_noise_sigma},
            {"explore_mean", p.explore_mean},
            {"hub_rest", p.hub_rest},
            {"detect_radius", p.detect_radius},
            {"assess_duration", p.assess_duration},
            {"advocacy_exponent", p.advocacy_exponent}}},
          {"trial",
           {{"n_targets", t.n_targets},
            {"n_collectives", t.n_collectives},
            {"population", t.population},
            {"range", t.range},
            {"decisions_per_collective", t.decisions_per_collective},
            {"component_time_limit", t.component_time_limit},
            {"decision_cap_on_timeout", t.decision_cap_on_timeout},
            {"p_lost", t.p_lost},
            {"max_component_duration", t.max_component_duration},
            {"hub_spacing", t.hub_spacing}}}};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

Scenario make_scenario(Model model, std::uint64_t seed, std::optional<Difficulty> difficulty) {
  Scenario s;
  s.params = ModelParams::defaults_for(model);
  s.trial.seed = seed;
  if (difficulty) {
    s.components.assign(2, *difficulty);
    s.trial.difficulty = *difficulty;
  }
  s.validate();
  return s;
}

}  // namespace hubsim
