#include "hubsim/engine.hpp"

#include <algorithm>

namespace hubsim {

using nlohmann::json;

namespace {

const char* state_letter(Decision d) {
  switch (d) {
    case Decision::Uncommitted: return "U";
    case Decision::Favoring: return "F";
    case Decision::Committed: return "C";
    case Decision::Executing: return "X";
  }
  return "?";
}

}  // namespace

Engine::Engine(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
  const auto seed = scenario_.trial.seed;
  world_rng_ = make_stream(seed, 0);
  for (int k = 0; k < scenario_.trial.n_collectives; ++k)
    collective_rngs_.push_back(make_stream(seed, static_cast<std::uint32_t>(k + 1)));
  template_plan_ = probe_template_plan(world_rng_);

  start_component(0);
}

Difficulty Engine::difficulty() const { return scenario_.components.at(static_cast<std::size_t>(std::max(0, component_))); }

void Engine::submit(EngineInput input) { inputs_.push_back(std::move(input)); }

void Engine::start_component(int index) {
  component_ = index;
  TrialConfig config = scenario_.trial;
  config.difficulty = scenario_.components.at(static_cast<std::size_t>(index));
  const WorldLayout layout = generate_trial(config, world_rng_);

  collectives_.clear();
  for (std::size_t k = 0; k < layout.hubs.size(); ++k) {
    auto c = Collective::create(collective_id(static_cast<std::int32_t>(k)), layout.hubs[k], scenario_.params.model,
                                config.population);
    c.decision_started = now();
    collectives_.push_back(std::move(c));
  }
  targets_ = layout.targets;

  progress_ = TrialProgress{now(), 0, config.total_decisions(), config.component_time_limit,
                            config.decision_cap_on_timeout};
  pending_end_.reset();
  desk_.assignments = AssignmentLog{};
  probe_schedule_ = schedule_probes(now());
  next_probe_ = 0;
  support_trend_.clear();

  ComponentStart start;
  start.index = index;
  start.difficulty = config.difficulty;
  start.hubs = layout.hubs;
  start.targets = layout.targets;
  std::vector<EventPayload> out{start};
  flush(out, log_);
}

void Engine::end_component(TrialEndReason reason) {
  std::vector<EventPayload> out{ComponentEnd{component_, reason, progress_.decisions}};
  flush(out, log_);
  if (component_ + 1 < static_cast<int>(scenario_.components.size())) {
    start_component(component_ + 1);
  } else {
    std::vector<EventPayload> end{TrialEnd{decisions_total_}};
    flush(end, log_);
    finished_ = true;
  }
}

std::vector<SessionEvent> Engine::step() {
  if (finished_) return {};
  const std::size_t first = log_.size();
  ++tick_;
  const double t = now();

  std::vector<EventPayload> out;
  apply_inputs(out);

  if (!pending_end_) {
    for (std::size_t k = 0; k < collectives_.size(); ++k)
      step_collective(collectives_[k], targets_, scenario_.params, collective_rngs_[k], t, kTickSeconds, out);
    resolve_arrivals(out);
  }
  if (tick_ % 10 == 0) sample_support();
  ask_due_probes(out);
  flush(out, log_);
  check_component_end();

  return {log_.begin() + static_cast<std::ptrdiff_t>(first), log_.end()};
}

std::int64_t Engine::run(std::int64_t max_ticks) {
  std::int64_t n = 0;
  while (!finished_ && n < max_ticks) {
    step();
    ++n;
  }
  return n;
}

void Engine::apply_inputs(std::vector<EventPayload>& out) {
  const double t = now();
  while (!inputs_.empty()) {
    EngineInput input = std::move(inputs_.front());
    inputs_.pop_front();

    if (auto* cmd = std::get_if<OperatorCommand>(&input)) {
      cmd->issued_at = t;
      const auto k = static_cast<std::size_t>(to_int(cmd->collective));
      Rng& rng = k < collective_rngs_.size() ? collective_rngs_[k] : world_rng_;
      std::vector<EventPayload> effects;
      CommandResult result = process_command(desk_, *cmd, collectives_, targets_, scenario_.params, rng, t, effects);
      out.emplace_back(std::move(result));
      for (auto& e : effects) out.push_back(std::move(e));
    } else if (auto* answer = std::get_if<ProbeAnswerInput>(&input)) {
      const auto it = std::find_if(probes_.begin(), probes_.end(),
                                   [&](const SAProbe& p) { return p.index == answer->index; });
      if (it == probes_.end() || !unanswered_and_open(*it, t) || t < it->ask_time) continue;
      it->response = answer->response;
      it->response_time = t;
      out.emplace_back(ProbeAnswered{it->index, answer->response, t, it->correct()});
    } else {
      auto event = std::get<InteractionEvent>(input);
      event.timestamp = t;
      out.emplace_back(UIEvent{event});
    }
  }
}

void Engine::resolve_arrivals(std::vector<EventPayload>& out) {
  const double t = now();
  for (std::size_t k = 0; k < collectives_.size(); ++k) {
    Collective& c = collectives_[k];
    if (c.phase.kind != PhaseKind::Executing || t + 1e-9 < c.arrival_time) continue;

    Target* target = find_target(targets_, c.phase.target);
    if (target == nullptr) throw std::logic_error("executing toward unknown target");
    const int best = std::max(ground_truth_best_value(targets_, c.hub_position), target->value);
    const MoveOutcome outcome =
        resolve_hub_move(c, *target, collectives_, scenario_.trial.p_lost, collective_rngs_[k], out);

    DecisionRecord d;
    d.collective = c.id;
    d.index = c.decisions_made + 1;
    d.component = component_;
    d.start = c.decision_started;
    d.end = t;
    d.selected_target = target->id;
    d.selected_value = target->value;
    d.ground_truth_best_value = best;
    d.established = outcome.established();
    d.operator_decided = c.operator_decided;
    d.commit_time = c.commit_time;
    d.decide_time = c.decide_time;
    d.difficulty = difficulty();
    out.emplace_back(d);

    desk_.assignments.clear_collective(c.id);
    advance_decision(c, progress_, scenario_.trial.decisions_per_collective, t, out);
    ++decisions_total_;
  }
}

void Engine::check_component_end() {
  const double t = now();
  const double elapsed = t - progress_.component_start;
  if (elapsed + 1e-9 >= scenario_.trial.max_component_duration) {
    end_component(pending_end_.value_or(TrialEndReason::Timeout));
    return;
  }
  if (!pending_end_ && progress_.should_end(t)) {
    pending_end_ = progress_.decisions >= progress_.total_decisions ? TrialEndReason::DecisionsComplete
                                                                    : TrialEndReason::DecisionCapAfterLimit;
    // Remaining collectives stop; the component stays open until its probes finish.
    for (auto& c : collectives_) {
      c.idle = true;
      c.decide_locked = true;
    }
  }
  if (!pending_end_) return;
  const bool probes_done =
      next_probe_ >= probe_schedule_.size() &&
      std::none_of(probes_.begin(), probes_.end(), [&](const SAProbe& p) { return unanswered_and_open(p, t); });
  if (probes_done) end_component(*pending_end_);
}

void Engine::sample_support() {
  const double t = now();
  for (const auto& target : targets_) {
    auto& series = support_trend_[target.id];
    if (target.occupied) {
      series.clear();
      continue;
    }
    int total = 0;
    for (const auto& c : collectives_) total += c.support_for(target.id);
    series.emplace_back(t, total);
    std::erase_if(series, [&](const auto& s) { return s.first < t - kTrendHorizon - 1e-9; });
  }
}

std::optional<SAProbe> Engine::build_probe(ProbeTemplate templ, double ask_time) {
  const WorldSnapshot view = world_view();
  for (int attempt = 0; attempt < kProbeSubjectAttempts; ++attempt) {
    SAProbe p;
    p.index = static_cast<int>(probes_.size());
    p.ask_time = ask_time;
    p.templ = templ;
    p.level = level_of(templ);

    if (template_needs_collective(templ)) {
      const auto& c = collectives_[static_cast<std::size_t>(uniform_int(world_rng_, 0, static_cast<int>(collectives_.size()) - 1))];
      p.subject_collective = c.id;
      p.subject_position = c.hub_position;
    }
    if (template_needs_target(templ)) {
      std::vector<const Target*> pool;
      for (const auto& t : targets_)
        if (!t.occupied && t.discovered()) pool.push_back(&t);
      if (p.subject_collective) {
        std::vector<const Target*> near;
        const Vec2 hub = collectives_[static_cast<std::size_t>(to_int(*p.subject_collective))].hub_position;
        for (const auto* t : pool)
          if (in_range(hub, *t)) near.push_back(t);
        if (!near.empty()) pool = near;
      }
      if (pool.empty())
        for (const auto& t : targets_)
          if (!t.occupied) pool.push_back(&t);
      if (pool.empty()) return std::nullopt;
      const Target* chosen = pool[static_cast<std::size_t>(uniform_int(world_rng_, 0, static_cast<int>(pool.size()) - 1))];
      p.subject_target = chosen->id;
      p.subject_position = chosen->position;
    }
    try {
      p.ground_truth = ground_truth_answer(p, view);
      return p;
    } catch (const SubjectVanished&) {
      continue;
    }
  }
  return std::nullopt;
}

void Engine::ask_due_probes(std::vector<EventPayload>& out) {
  const double t = now();
  while (next_probe_ < probe_schedule_.size() && t + 1e-9 >= probe_schedule_[next_probe_]) {
    const std::size_t slot = static_cast<std::size_t>(component_) * kProbesPerComponent + next_probe_;
    const ProbeTemplate templ = template_plan_[slot % template_plan_.size()];
    auto probe = build_probe(templ, probe_schedule_[next_probe_]);
    ++next_probe_;
    if (!probe) continue;
    probes_.push_back(*probe);
    out.emplace_back(ProbeAsked{*probe});
  }
}

void Engine::flush(std::vector<EventPayload>& out, std::vector<SessionEvent>& sink) {
  for (auto& p : out) sink.push_back(SessionEvent{next_seq_++, tick_, std::move(p)});
  out.clear();
}

WorldSnapshot Engine::world_view() const {
  WorldSnapshot s;
  s.now = now();
  for (const auto& c : collectives_)
    s.collectives.push_back(CollectiveView{c.id, c.hub_position, c.phase, c.support, c.abandoned, c.live_population(), c.idle});
  for (const auto& t : targets_)
    s.targets.push_back(TargetView{t.id, t.position, t.value, t.valued(), t.occupied, t.discovered_by});
  s.support_trend = support_trend_;
  return s;
}

json Engine::snapshot_json(bool include_entities) const {
  const double t = now();
  json collectives = json::array();
  for (const auto& c : collectives_) {
    const auto counts = c.state_counts();
    json support = json::object();
    for (const auto& [target, n] : c.support) support[std::to_string(to_int(target))] = n;
    json abandoned = json::array();
    for (auto a : c.abandoned) abandoned.push_back(to_int(a));
    json jc{{"id", to_int(c.id)},
            {"label", roman_label(c.id)},
            {"hub", {c.hub_position.x, c.hub_position.y}},
            {"phase", to_string(c.phase)},
            {"live", c.live_population()},
            {"counts", {{"U", counts[0]}, {"F", counts[1]}, {"C", counts[2]}, {"X", counts[3]}}},
            {"support", support},
            {"abandoned", abandoned},
            {"decisions_made", c.decisions_made},
            {"decide_locked", c.decide_locked},
            {"idle", c.idle}};
    if (c.phase.kind == PhaseKind::Executing)
      jc["destination"] = {c.execute_destination.x, c.execute_destination.y};
    if (include_entities) {
      json entities = json::array();
      for (const auto& e : c.entities)
        entities.push_back({e.position.x, e.position.y, e.lost() ? "L" : state_letter(e.state.decision())});
      jc["entities"] = entities;
    }
    collectives.push_back(jc);
  }

  json targets = json::array();
  for (const auto& target : targets_) {
    if (!target.discovered() || target.occupied) continue;
    json support = json::object();
    json outline = json::object();
    for (const auto& c : collectives_) {
      const auto key = std::to_string(to_int(c.id));
      const int n = c.support_for(target.id);
      if (n > 0) support[key] = n;
      if (c.abandoned.contains(target.id))
        outline[key] = "abandoned";
      else if (in_range(c.hub_position, target))
        outline[key] = n > 0 ? "investigating" : "in_range";
    }
    json discovered = json::array();
    for (auto c : target.discovered_by) discovered.push_back(to_int(c));
    targets.push_back({{"id", to_int(target.id)},
                       {"position", {target.position.x, target.position.y}},
                       {"valued", target.valued()},
                       {"value", target.valued() ? json(target.value) : json(nullptr)},
                       {"evaluations", target.evaluations},
                       {"discovered_by", discovered},
                       {"support", support},
                       {"outline", outline}});
  }

  json assignments = json::array();
  for (const auto& a : desk_.assignments.all()) {
    json ja = to_json(a.command);
    ja["id"] = a.id;
    ja["status"] = to_string(a.status);
    assignments.push_back(ja);
  }

  json messages = json::array();
  const std::size_t from = desk_.messages.size() > 50 ? desk_.messages.size() - 50 : 0;
  for (std::size_t i = from; i < desk_.messages.size(); ++i) {
    const auto& m = desk_.messages[i];
    messages.push_back({{"time", m.timestamp},
                        {"severity", m.severity == Severity::Illegal ? "Illegal" : "Info"},
                        {"text", m.text},
                        {"cause", to_string(m.cause)}});
  }

  json probe = nullptr;
  for (const auto& p : probes_) {
    if (!unanswered_and_open(p, t)) continue;
    probe = {{"index", p.index},
             {"level", to_string(p.level)},
             {"template", to_string(p.templ)},
             {"question", question_text(p.templ, p.subject_collective, p.subject_target)},
             {"ask_time", p.ask_time},
             {"expires", response_window_end(p)}};
  }

  return {{"seq", last_seq()},
          {"tick", tick_},
          {"time", t},
          {"component", component_},
          {"difficulty", to_string(difficulty())},
          {"visualization", to_string(scenario_.visualization)},
          {"model", to_string(scenario_.params.model)},
          {"finished", finished_},
          {"progress",
           {{"decisions", progress_.decisions},
            {"total_decisions", progress_.total_decisions},
            {"component_start", progress_.component_start}}},
          {"collectives", collectives},
          {"targets", targets},
          {"assignments", assignments},
          {"messages", messages},
          {"probe", probe}};
}

}  // namespace hubsim
