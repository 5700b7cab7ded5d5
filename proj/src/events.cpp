#include "hubsim/events.hpp"

#include <algorithm>

namespace hubsim {

using nlohmann::json;

namespace {

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }
Vec2 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::optional<int> opt_target_int(const std::optional<TargetId>& t) {
  return t ? std::optional<int>(to_int(*t)) : std::nullopt;
}

std::optional<int> opt_collective_int(const std::optional<CollectiveId>& c) {
  return c ? std::optional<int>(to_int(*c)) : std::nullopt;
}

TransitionCause parse_transition_cause(std::string_view s) {
  for (auto c : {TransitionCause::Discovery, TransitionCause::Recruit, TransitionCause::CommitContact,
                 TransitionCause::Quorum, TransitionCause::Investigate, TransitionCause::Abandon,
                 TransitionCause::Decide, TransitionCause::TargetLost, TransitionCause::Reassess,
                 TransitionCause::Reset})
    if (to_string(c) == s) return c;
  throw DomainError("unknown transition cause: " + std::string(s));
}

TrialEndReason parse_end_reason(std::string_view s) {
  for (auto r : {TrialEndReason::DecisionsComplete, TrialEndReason::DecisionCapAfterLimit, TrialEndReason::Timeout})
    if (to_string(r) == s) return r;
  throw DomainError("unknown trial end reason: " + std::string(s));
}

SALevel parse_level(std::string_view s) {
  if (s == "SA1") return SALevel::SA1;
  if (s == "SA2") return SALevel::SA2;
  if (s == "SA3") return SALevel::SA3;
  throw DomainError("unknown SA level: " + std::string(s));
}

json verdict_json(const Verdict& v) {
  json j{{"accepted", v.accepted}};
  if (!v.accepted) {
    j["cause"] = to_string(v.cause);
    j["text"] = v.text;
  }
  return j;
}

Verdict verdict_from(const json& j) {
  if (j.at("accepted").get<bool>()) return Verdict::accept();
  return Verdict::illegal(parse_illegal_cause(j.at("cause").get<std::string>()), j.at("text").get<std::string>());
}

json layout_json(const LayoutCounts& l) {
  return {{"highlighted_targets", l.highlighted_targets},
          {"plain_targets", l.plain_targets},
          {"target_windows", l.target_windows},
          {"collective_windows", l.collective_windows},
          {"mode", to_string(l.mode)}};
}

LayoutCounts layout_from(const json& j) {
  LayoutCounts l;
  l.highlighted_targets = j.value("highlighted_targets", 0);
  l.plain_targets = j.value("plain_targets", 0);
  l.target_windows = j.value("target_windows", 0);
  l.collective_windows = j.value("collective_windows", 0);
  l.mode = parse_visualization(j.value("mode", std::string("Collective")));
  if (l.highlighted_targets < 0 || l.plain_targets < 0 || l.target_windows < 0 || l.collective_windows < 0)
    throw DomainError("layout counts must be non-negative");
  return l;
}

struct PayloadWriter {
  json& j;

  void operator()(const EntityTransition& p) const {
    j["collective"] = to_int(p.collective);
    j["entity"] = p.entity;
    j["from"] = to_string(p.from);
    j["to"] = to_string(p.to);
    j["cause"] = to_string(p.cause);
  }
  void operator()(const EntityLost& p) const {
    j["collective"] = to_int(p.collective);
    j["entity"] = p.entity;
  }
  void operator()(const Discovery& p) const {
    j["collective"] = to_int(p.collective);
    j["target"] = to_int(p.target);
    j["entity"] = p.entity;
  }
  void operator()(const TargetValued& p) const {
    j["target"] = to_int(p.target);
    j["value"] = p.value;
  }
  void operator()(const PhaseChange& p) const {
    j["collective"] = to_int(p.collective);
    j["from"] = to_string(p.from);
    j["to"] = to_string(p.to);
  }
  void operator()(const CommandResult& p) const {
    j["command"] = to_json(p.command);
    j["verdict"] = verdict_json(p.verdict);
    j["assignment_id"] = opt_json(p.assignment_id);
    j["support"] = p.support;
    j["live_population"] = p.live_population;
    j["highest_value_target"] = p.highest_value_target;
    j["decision_index"] = p.decision_index;
  }
  void operator()(const ProbeAsked& p) const { j["probe"] = to_json(p.probe); }
  void operator()(const ProbeAnswered& p) const {
    j["index"] = p.index;
    j["response"] = to_json(p.response);
    j["response_time"] = p.response_time;
    j["correct"] = p.correct;
  }
  void operator()(const HubMove& p) const {
    j["collective"] = to_int(p.collective);
    j["outcome"] = p.outcome == MoveOutcomeKind::Established ? "Established" : "Returned";
    j["target"] = to_int(p.target);
    j["from"] = vec_json(p.from);
    j["to"] = vec_json(p.to);
  }
  void operator()(const DecisionRecord& p) const { j["decision"] = to_json(p); }
  void operator()(const ComponentStart& p) const {
    j["index"] = p.index;
    j["difficulty"] = to_string(p.difficulty);
    json hubs = json::array();
    for (auto h : p.hubs) hubs.push_back(vec_json(h));
    j["hubs"] = hubs;
    json targets = json::array();
    for (const auto& t : p.targets) targets.push_back(to_json(t));
    j["targets"] = targets;
  }
  void operator()(const ComponentEnd& p) const {
    j["index"] = p.index;
    j["reason"] = to_string(p.reason);
    j["decisions"] = p.decisions;
  }
  void operator()(const TrialEnd& p) const { j["decisions"] = p.decisions; }
  void operator()(const UIEvent& p) const { j["event"] = to_json(p.event); }
};

EventPayload payload_from(const std::string& type, const json& j) {
  const auto col = [&](const char* k = "collective") { return collective_id(j.at(k).get<int>()); };
  const auto tgt = [&](const char* k = "target") { return target_id(j.at(k).get<int>()); };
  if (type == "EntityTransition")
    return EntityTransition{col(), j.at("entity").get<int>(), parse_entity_state(j.at("from").get<std::string>()),
                            parse_entity_state(j.at("to").get<std::string>()),
                            parse_transition_cause(j.at("cause").get<std::string>())};
  if (type == "EntityLost") return EntityLost{col(), j.at("entity").get<int>()};
  if (type == "Discovery") return Discovery{col(), tgt(), j.at("entity").get<int>()};
  if (type == "TargetValued") return TargetValued{tgt(), j.at("value").get<int>()};
  if (type == "PhaseChange")
    return PhaseChange{col(), parse_phase(j.at("from").get<std::string>()), parse_phase(j.at("to").get<std::string>())};
  if (type == "CommandResult") {
    CommandResult r;
    r.command = command_from_json(j.at("command"));
    r.verdict = verdict_from(j.at("verdict"));
    r.assignment_id = opt_from<int>(j, "assignment_id");
    r.support = j.at("support").get<int>();
    r.live_population = j.at("live_population").get<int>();
    r.highest_value_target = j.at("highest_value_target").get<bool>();
    r.decision_index = j.at("decision_index").get<int>();
    return r;
  }
  if (type == "ProbeAsked") return ProbeAsked{probe_from_json(j.at("probe"))};
  if (type == "ProbeAnswered")
    return ProbeAnswered{j.at("index").get<int>(), answer_from_json(j.at("response")),
                         j.at("response_time").get<double>(), j.at("correct").get<bool>()};
  if (type == "HubMove") {
    const auto outcome = j.at("outcome").get<std::string>();
    if (outcome != "Established" && outcome != "Returned") throw DomainError("unknown move outcome: " + outcome);
    return HubMove{col(), outcome == "Established" ? MoveOutcomeKind::Established : MoveOutcomeKind::Returned, tgt(),
                   vec_from(j.at("from")), vec_from(j.at("to"))};
  }
  if (type == "DecisionRecord") return decision_from_json(j.at("decision"));
  if (type == "ComponentStart") {
    ComponentStart c;
    c.index = j.at("index").get<int>();
    c.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
    for (const auto& h : j.at("hubs")) c.hubs.push_back(vec_from(h));
    for (const auto& t : j.at("targets")) c.targets.push_back(target_from_json(t));
    return c;
  }
  if (type == "ComponentEnd")
    return ComponentEnd{j.at("index").get<int>(), parse_end_reason(j.at("reason").get<std::string>()),
                        j.at("decisions").get<int>()};
  if (type == "TrialEnd") return TrialEnd{j.at("decisions").get<int>()};
  if (type == "UIEvent") return UIEvent{interaction_from_json(j.at("event"))};
  throw DomainError("unknown event type: " + type);
}

}  // namespace

std::string_view to_string(TransitionCause c) {
  switch (c) {
    case TransitionCause::Discovery: return "Discovery";
    case TransitionCause::Recruit: return "Recruit";
    case TransitionCause::CommitContact: return "CommitContact";
    case TransitionCause::Quorum: return "Quorum";
    case TransitionCause::Investigate: return "Investigate";
    case TransitionCause::Abandon: return "Abandon";
    case TransitionCause::Decide: return "Decide";
    case TransitionCause::TargetLost: return "TargetLost";
    case TransitionCause::Reassess: return "Reassess";
    case TransitionCause::Reset: return "Reset";
  }
  return "?";
}

std::string_view to_string(TrialEndReason r) {
  switch (r) {
    case TrialEndReason::DecisionsComplete: return "DecisionsComplete";
    case TrialEndReason::DecisionCapAfterLimit: return "DecisionCapAfterLimit";
    case TrialEndReason::Timeout: return "Timeout";
  }
  return "?";
}

std::string_view payload_type(const EventPayload& p) {
  static constexpr std::string_view kNames[] = {
      "EntityTransition", "EntityLost", "Discovery",      "TargetValued", "PhaseChange",
      "CommandResult",    "ProbeAsked", "ProbeAnswered",  "HubMove",      "DecisionRecord",
      "ComponentStart",   "ComponentEnd", "TrialEnd",     "UIEvent"};
  return kNames[p.index()];
}

json to_json(const SessionEvent& e) {
  json j{{"seq", e.seq}, {"tick", e.tick}, {"type", payload_type(e.payload)}};
  std::visit(PayloadWriter{j}, e.payload);
  return j;
}

SessionEvent event_from_json(const json& j) {
  SessionEvent e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.tick = j.at("tick").get<std::int64_t>();
  e.payload = payload_from(j.at("type").get<std::string>(), j);
  return e;
}

json to_json(const OperatorCommand& c) {
  return {{"kind", to_string(c.kind)},
          {"collective", to_int(c.collective)},
          {"target", opt_json(opt_target_int(c.target))},
          {"assignment_id", opt_json(c.assignment_id)},
          {"issued_at", c.issued_at}};
}

OperatorCommand command_from_json(const json& j) {
  OperatorCommand c;
  c.kind = parse_command_kind(j.at("kind").get<std::string>());
  const json& col = j.at("collective");
  c.collective = col.is_string() ? parse_roman_label(col.get<std::string>()) : collective_id(col.get<int>());
  if (auto t = opt_from<int>(j, "target")) c.target = target_id(*t);
  c.assignment_id = opt_from<int>(j, "assignment_id");
  c.issued_at = j.value("issued_at", 0.0);
  return c;
}

json to_json(const Answer& a) {
  struct Visitor {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(bool b) const { return b; }
    json operator()(int v) const { return v; }
    json operator()(const std::vector<int>& ids) const { return ids; }
  };
  return std::visit(Visitor{}, a);
}

Answer answer_from_json(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_array()) {
    auto ids = j.get<std::vector<int>>();
    std::sort(ids.begin(), ids.end());
    return ids;
  }
  throw DomainError("unsupported answer: " + j.dump());
}

json to_json(const InteractionEvent& e) {
  json j{{"timestamp", e.timestamp},
         {"kind", to_string(e.kind)},
         {"subject", e.subject},
         {"window", e.window == WindowKind::Target ? "target" : "collective"},
         {"x", e.screen_position.x},
         {"y", e.screen_position.y}};
  if (e.layout) j["layout"] = layout_json(*e.layout);
  return j;
}

InteractionEvent interaction_from_json(const json& j) {
  InteractionEvent e;
  e.timestamp = j.at("timestamp").get<double>();
  e.kind = parse_interaction_kind(j.at("kind").get<std::string>());
  e.subject = j.value("subject", -1);
  const auto window = j.value("window", std::string("target"));
  if (window != "target" && window != "collective") throw DomainError("unknown window kind: " + window);
  e.window = window == "target" ? WindowKind::Target : WindowKind::Collective;
  e.screen_position = {j.value("x", 0.0), j.value("y", 0.0)};
  if (j.contains("layout") && !j.at("layout").is_null()) e.layout = layout_from(j.at("layout"));
  return e;
}

json to_json(const SAProbe& p) {
  json j{{"index", p.index},
         {"ask_time", p.ask_time},
         {"level", to_string(p.level)},
         {"template", to_string(p.templ)},
         {"collective", opt_json(opt_collective_int(p.subject_collective))},
         {"target", opt_json(opt_target_int(p.subject_target))},
         {"subject_position", vec_json(p.subject_position)},
         {"ground_truth", to_json(p.ground_truth)},
         {"response", p.response ? to_json(*p.response) : json(nullptr)},
         {"answered", p.response.has_value()},
         {"response_time", opt_json(p.response_time)}};
  return j;
}

SAProbe probe_from_json(const json& j) {
  SAProbe p;
  p.index = j.at("index").get<int>();
  p.ask_time = j.at("ask_time").get<double>();
  p.level = parse_level(j.at("level").get<std::string>());
  p.templ = parse_probe_template(j.at("template").get<std::string>());
  if (auto c = opt_from<int>(j, "collective")) p.subject_collective = collective_id(*c);
  if (auto t = opt_from<int>(j, "target")) p.subject_target = target_id(*t);
  if (j.contains("subject_position")) p.subject_position = vec_from(j.at("subject_position"));
  p.ground_truth = answer_from_json(j.at("ground_truth"));
  if (j.value("answered", false)) p.response = answer_from_json(j.at("response"));
  p.response_time = opt_from<double>(j, "response_time");
  return p;
}

json to_json(const Target& t) {
  json discovered = json::array();
  for (auto c : t.discovered_by) discovered.push_back(to_int(c));
  return {{"id", to_int(t.id)},
          {"position", vec_json(t.position)},
          {"value", t.value},
          {"discovered_by", discovered},
          {"evaluations", t.evaluations},
          {"occupied", t.occupied}};
}

Target target_from_json(const json& j) {
  Target t;
  t.id = target_id(j.at("id").get<int>());
  t.position = vec_from(j.at("position"));
  t.value = j.at("value").get<int>();
  if (t.value < kMinTargetValue || t.value > kMaxTargetValue) throw DomainError("target value out of range");
  for (const auto& c : j.value("discovered_by", json::array())) t.discovered_by.insert(collective_id(c.get<int>()));
  t.evaluations = j.value("evaluations", 0);
  t.occupied = j.value("occupied", false);
  return t;
}

json to_json(const DecisionRecord& d) {
  return {{"collective", to_int(d.collective)},
          {"index", d.index},
          {"component", d.component},
          {"start", d.start},
          {"end", d.end},
          {"selected_target", to_int(d.selected_target)},
          {"selected_value", d.selected_value},
          {"ground_truth_best_value", d.ground_truth_best_value},
          {"established", d.established},
          {"operator_decided", d.operator_decided},
          {"commit_time", opt_json(d.commit_time)},
          {"decide_time", opt_json(d.decide_time)},
          {"difficulty", to_string(d.difficulty)}};
}

DecisionRecord decision_from_json(const json& j) {
  DecisionRecord d;
  d.collective = collective_id(j.at("collective").get<int>());
  d.index = j.at("index").get<int>();
  d.component = j.at("component").get<int>();
  d.start = j.at("start").get<double>();
  d.end = j.at("end").get<double>();
  d.selected_target = target_id(j.at("selected_target").get<int>());
  d.selected_value = j.at("selected_value").get<int>();
  d.ground_truth_best_value = j.at("ground_truth_best_value").get<int>();
  d.established = j.at("established").get<bool>();
  d.operator_decided = j.at("operator_decided").get<bool>();
  d.commit_time = opt_from<double>(j, "commit_time");
  d.decide_time = opt_from<double>(j, "decide_time");
  d.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
  return d;
}

}  // namespace hubsim
