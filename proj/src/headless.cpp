#include "hubsim/headless.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hubsim {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const SAScores& s) {
  return {{"overall", opt(s.overall)}, {"sa1", opt(s.sa1)}, {"sa2", opt(s.sa2)}, {"sa3", opt(s.sa3)},
          {"asked", s.asked},          {"correct", s.correct}};
}

PerformanceMetrics rollup_for(Difficulty d, const std::vector<DecisionRecord>& decisions,
                              const std::vector<SAProbe>& probes, const std::vector<Difficulty>& probe_difficulty,
                              const std::vector<InteractionEvent>& interactions) {
  std::vector<DecisionRecord> ds;
  for (const auto& r : decisions)
    if (r.difficulty == d) ds.push_back(r);
  std::vector<SAProbe> ps;
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (probe_difficulty[i] == d) ps.push_back(probes[i]);
  return performance_rollup(ds, ps, interactions);
}

}  // namespace

std::string_view to_string(Responder r) { return r == Responder::Oracle ? "oracle" : "none"; }

Responder parse_responder(std::string_view s) {
  if (s == "oracle") return Responder::Oracle;
  if (s == "none") return Responder::None;
  throw ConfigError("unknown responder: " + std::string(s));
}

TrialResult compute_result(const Scenario& scenario, PolicyKind policy, Responder responder,
                           const std::vector<SessionEvent>& events) {
  TrialResult r;
  r.scenario = scenario;
  r.policy = policy;
  r.responder = responder;
  r.event_count = events.size();

  std::vector<Difficulty> probe_difficulty;
  Difficulty current = scenario.components.front();
  for (const auto& e : events) {
    r.sim_seconds = e.sim_time();
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ComponentStart>) {
            current = p.difficulty;
          } else if constexpr (std::is_same_v<T, ComponentEnd>) {
            r.components.push_back(p);
          } else if constexpr (std::is_same_v<T, DecisionRecord>) {
            r.decisions.push_back(p);
          } else if constexpr (std::is_same_v<T, ProbeAsked>) {
            r.probes.push_back(p.probe);
            probe_difficulty.push_back(current);
          } else if constexpr (std::is_same_v<T, ProbeAnswered>) {
            for (auto& probe : r.probes) {
              if (probe.index != p.index) continue;
              probe.response = p.response;
              probe.response_time = p.response_time;
            }
          } else if constexpr (std::is_same_v<T, CommandResult>) {
            r.commands.push_back(p);
          } else if constexpr (std::is_same_v<T, UIEvent>) {
            r.interactions.push_back(p.event);
            if (p.event.kind == InteractionKind::Layout && p.event.layout)
              r.layout.push_back(LayoutSample{p.event.timestamp, *p.event.layout});
          }
        },
        e.payload);
  }

  r.overall = performance_rollup(r.decisions, r.probes, r.interactions);
  r.easy = rollup_for(Difficulty::Easy, r.decisions, r.probes, probe_difficulty, r.interactions);
  r.hard = rollup_for(Difficulty::Hard, r.decisions, r.probes, probe_difficulty, r.interactions);
  r.interaction = classify_interactions(r.interactions, r.commands);
  if (!r.layout.empty()) r.clutter = clutter_at_probes(r.probes, r.layout);
  for (const auto& p : r.probes) r.distances.push_back(probe_distances(p, world_to_screen(p.subject_position), r.interactions));
  return r;
}

json to_json(const PerformanceMetrics& m) {
  return {{"decisions", m.decisions},
          {"decision_time_minutes", opt(m.decision_time_minutes)},
          {"selection_success_pct", opt(m.selection_success_pct)},
          {"mean_selected_value", opt(m.mean_selected_value)},
          {"commit_to_decide_minutes", opt(m.commit_to_decide_minutes)},
          {"target_window_open_pct", opt(m.target_window_open_pct)},
          {"target_window_frequency", opt(m.target_window_frequency)},
          {"sa", to_json(m.sa)}};
}

json to_json(const InteractionSummary& s) {
  return {{"collective_left_clicks", s.collective_left_clicks},
          {"collective_right_clicks", s.collective_right_clicks},
          {"target_left_clicks", s.target_left_clicks},
          {"target_right_clicks", s.target_right_clicks},
          {"collective_observations", s.collective_observations},
          {"target_observations", s.target_observations},
          {"collective_observation_pct", opt(s.collective_observation_pct())},
          {"target_observation_pct", opt(s.target_observation_pct())},
          {"investigate_commands", s.investigate_commands},
          {"abandon_commands", s.abandon_commands},
          {"decide_commands", s.decide_commands},
          {"illegal_commands", s.illegal_commands},
          {"interventions", s.interventions},
          {"distinct_abandoned", s.distinct_abandoned},
          {"highest_value_abandoned_pct", opt(s.highest_value_abandoned_pct())},
          {"abandon_exceeded_pct", opt(s.abandon_exceeded_pct())},
          {"windows_opened", s.windows_opened}};
}

json to_json(const TrialResult& r) {
  json decisions = json::array();
  for (const auto& d : r.decisions) decisions.push_back(to_json(d));
  json probes = json::array();
  for (const auto& p : r.probes) probes.push_back(to_json(p));
  json components = json::array();
  for (const auto& c : r.components)
    components.push_back({{"index", c.index}, {"reason", to_string(c.reason)}, {"decisions", c.decisions}});
  json clutter = json::array();
  for (const auto& c : r.clutter)
    clutter.push_back({{"probe", c.probe_index},
                       {"level", to_string(c.level)},
                       {"before", c.before},
                       {"during_asking", c.during_asking},
                       {"during_response", c.during_response}});
  json distances = json::array();
  for (const auto& d : r.distances)
    distances.push_back({{"before", opt(d.before)}, {"during_asking", opt(d.during_asking)},
                         {"during_response", opt(d.during_response)}});
  return {{"scenario", to_json(r.scenario)},
          {"policy", to_string(r.policy)},
          {"responder", to_string(r.responder)},
          {"sim_seconds", r.sim_seconds},
          {"event_count", r.event_count},
          {"components", components},
          {"overall", to_json(r.overall)},
          {"easy", to_json(r.easy)},
          {"hard", to_json(r.hard)},
          {"interaction", to_json(r.interaction)},
          {"clutter", clutter},
          {"probe_distances", distances},
          {"decisions", decisions},
          {"probes", probes}};
}

void oracle_answers(const Engine& engine, std::vector<ProbeAnswerInput>& out) {
  const double t = engine.now();
  for (const auto& p : engine.probes()) {
    if (p.response || t + 1e-9 < p.ask_time + kProbePromptSeconds || t > response_window_end(p)) continue;
    out.push_back(ProbeAnswerInput{p.index, p.ground_truth});
  }
}

HeadlessRun run_headless(const Scenario& scenario, const RunOptions& options) {
  Engine engine(scenario);
  auto policy = make_policy(options.policy);
  std::vector<OperatorCommand> commands;
  std::vector<ProbeAnswerInput> answers;
  std::int64_t ticks = 0;
  while (!engine.finished() && ticks < options.max_ticks) {
    engine.step();
    ++ticks;
    commands.clear();
    policy->act(engine, commands);
    for (auto& c : commands) engine.submit(c);
    if (options.responder == Responder::Oracle) {
      answers.clear();
      oracle_answers(engine, answers);
      for (auto& a : answers) engine.submit(a);
    }
  }
  HeadlessRun run;
  run.events = engine.events();
  run.result = compute_result(scenario, options.policy, options.responder, run.events);
  return run;
}

json log_header(const Scenario& scenario, PolicyKind policy, Responder responder) {
  return {{"format", kLogFormat},
          {"version", kLogVersion},
          {"scenario", to_json(scenario)},
          {"policy", to_string(policy)},
          {"responder", to_string(responder)}};
}

std::string event_line(const SessionEvent& e) { return to_json(e).dump(); }

void write_event_log(const std::filesystem::path& path, const json& header, const std::vector<SessionEvent>& events) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write event log: " + path.string());
  out << header.dump() << '\n';
  for (const auto& e : events) out << event_line(e) << '\n';
}

EventLog parse_event_log(std::istream& in) {
  EventLog log;
  std::string line;
  if (!std::getline(in, line)) throw LogError("empty event log", 0);
  try {
    log.header = json::parse(line);
    if (log.header.at("format").get<std::string>() != kLogFormat) throw LogError("not a hubsim event log", 0);
    if (log.header.at("version").get<int>() != kLogVersion)
      throw LogError("unsupported log version " + log.header.at("version").dump(), 0);
    log.scenario = scenario_from_json(log.header.at("scenario"));
    log.policy = parse_policy(log.header.at("policy").get<std::string>());
    log.responder = parse_responder(log.header.at("responder").get<std::string>());
  } catch (const LogError&) {
    throw;
  } catch (const std::exception& e) {
    throw LogError(std::string("bad log header: ") + e.what(), 0);
  }

  std::uint64_t last_seq = 0;
  std::int64_t last_tick = 0;
  bool ended = false;
  bool newline_terminated = true;
  while (std::getline(in, line)) {
    newline_terminated = !in.eof();
    if (line.empty()) continue;
    if (ended) throw LogError("events after TrialEnd", last_seq);
    SessionEvent e;
    try {
      e = event_from_json(json::parse(line));
    } catch (const std::exception& ex) {
      throw LogError(std::string("corrupt event record: ") + ex.what(), last_seq);
    }
    if (e.seq != last_seq + 1) throw LogError("sequence gap at seq " + std::to_string(e.seq), last_seq);
    if (e.tick < last_tick) throw LogError("tick went backwards at seq " + std::to_string(e.seq), last_seq);
    last_seq = e.seq;
    last_tick = e.tick;
    ended = std::holds_alternative<TrialEnd>(e.payload);
    log.events.push_back(std::move(e));
    log.lines.push_back(line);
  }
  if (!newline_terminated && !log.events.empty()) {
    // The final record was cut before its newline; it cannot be trusted.
    throw LogError("truncated final record", last_seq > 0 ? last_seq - 1 : 0);
  }
  if (!ended) throw LogError("log ends before TrialEnd", last_seq);
  return log;
}

EventLog read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError("cannot open event log " + path.string(), 0);
  return parse_event_log(in);
}

std::map<std::int64_t, std::vector<EngineInput>> logged_inputs(const std::vector<SessionEvent>& events) {
  std::map<std::int64_t, std::vector<EngineInput>> inputs;
  for (const auto& e : events) {
    if (const auto* c = std::get_if<CommandResult>(&e.payload)) {
      inputs[e.tick].emplace_back(c->command);
    } else if (const auto* a = std::get_if<ProbeAnswered>(&e.payload)) {
      inputs[e.tick].emplace_back(ProbeAnswerInput{a->index, a->response});
    } else if (const auto* u = std::get_if<UIEvent>(&e.payload)) {
      inputs[e.tick].emplace_back(u->event);
    }
  }
  return inputs;
}

ReplayReport replay(const EventLog& log) {
  Engine engine(log.scenario);
  const auto inputs = logged_inputs(log.events);
  const std::int64_t last_tick = log.events.empty() ? 0 : log.events.back().tick;
  while (!engine.finished() && engine.tick() < last_tick) {
    if (const auto it = inputs.find(engine.tick() + 1); it != inputs.end())
      for (const auto& in : it->second) engine.submit(in);
    engine.step();
  }

  ReplayReport report;
  const auto& regenerated = engine.events();
  report.events_replayed = regenerated.size();
  const std::size_t n = std::max(regenerated.size(), log.lines.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool same = i < regenerated.size() && i < log.lines.size() && event_line(regenerated[i]) == log.lines[i];
    if (same) continue;
    report.first_mismatch_seq = static_cast<std::uint64_t>(i + 1);
    break;
  }
  report.events_identical = !report.first_mismatch_seq;

  report.result = compute_result(log.scenario, log.policy, log.responder, log.events);
  const TrialResult live = compute_result(log.scenario, log.policy, log.responder, regenerated);
  report.metrics_identical = to_json(live).dump() == to_json(report.result).dump();
  return report;
}

ReplayReport replay_file(const std::filesystem::path& path) { return replay(read_event_log(path)); }

std::filesystem::path default_output_dir() {
  if (const char* dir = std::getenv("HUBSIM_OUTPUT_DIR"); dir != nullptr && *dir != '\0') return dir;
  return "hubsim-out";
}

}  // namespace hubsim
