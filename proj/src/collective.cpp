#include "hubsim/collective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hubsim {
namespace {

Vec2 random_point_in_disk(Vec2 center, double radius, Rng& rng) {
  const double r = radius * std::sqrt(uniform01(rng));
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

double exponential(Rng& rng, double mean) { return std::exponential_distribution<double>(1.0 / mean)(rng); }

bool target_available(const Collective& c, const Target* t) {
  return t != nullptr && !t->occupied && !c.abandoned.contains(t->id) && in_range(c.hub_position, *t);
}

void start_advocacy(Entity& e, const Collective& c, const Target& t, const ModelParams& params, double now) {
  e.dwell_until = now + interaction_delay(distance(c.hub_position, t.position), params);
  e.advocate_until = e.dwell_until + params.reassess_period;
}

void rest_in_hub(Entity& e, const ModelParams& params, double now) {
  e.visiting.reset();
  e.errand_until = now + params.hub_rest;
}

void head_to(Entity& e, TargetId t) {
  e.errand = Errand::TravelingToTarget;
  e.visiting = t;
  e.pending_report.reset();
}

// The discoverer reports its target and starts favoring it with probability equal to quality.
void deliver_report(Collective& c, std::size_t index, const Target* t, const ModelParams& params, Rng& rng,
                    double now, std::vector<EventPayload>& out) {
  Entity& e = c.entities[index];
  e.pending_report.reset();
  if (target_available(c, t) && e.last_assessed_quality && bernoulli(rng, std::pow(*e.last_assessed_quality, params.advocacy_exponent))) {
    c.set_state(index, EntityState::favoring(t->id), TransitionCause::Discovery, out);
    e.dwell_until = now;
    e.advocate_until = now + params.reassess_period;
    e.visiting = t->id;
  } else {
    rest_in_hub(e, params, now);
  }
}

void arrive_at_hub(Collective& c, std::size_t index, const std::vector<Target>& targets, const ModelParams& params,
                   Rng& rng, double now, std::vector<EventPayload>& out) {
  Entity& e = c.entities[index];
  e.errand = Errand::InHub;
  e.position = c.hub_position;

  switch (e.state.decision()) {
    case Decision::Uncommitted: {
      const Target* t = e.visiting ? find_target(targets, *e.visiting) : nullptr;
      if (!params.autonomous_consensus() || !target_available(c, t) || !e.last_assessed_quality) {
        rest_in_hub(e, params, now);
        break;
      }
      const double delay = interaction_delay(distance(c.hub_position, t->position), params);
      if (delay > 0.0) {
        e.pending_report = t->id;
        e.dwell_until = now + delay;
        e.errand_until = e.dwell_until;
      } else {
        deliver_report(c, index, t, params, rng, now, out);
      }
      break;
    }
    case Decision::Favoring: {
      const Target* t = find_target(targets, *e.state.target());
      if (!target_available(c, t)) {
        c.set_state(index, EntityState::uncommitted(), TransitionCause::TargetLost, out);
        rest_in_hub(e, params, now);
      } else if (params.autonomous_consensus() && e.last_assessed_quality &&
                 !bernoulli(rng, std::pow(*e.last_assessed_quality, params.advocacy_exponent))) {
        // Each reassessment is a fresh choice to keep favoring, taken with probability equal to quality.
        c.set_state(index, EntityState::uncommitted(), TransitionCause::Reassess, out);
        rest_in_hub(e, params, now);
      } else {
        start_advocacy(e, c, *t, params, now);
      }
      break;
    }
    case Decision::Committed:
    case Decision::Executing:
      break;
  }
}

void record_assessment(Collective& c, Entity& e, Target& t, const ModelParams& params, Rng& rng,
                       std::vector<EventPayload>& out) {
  if (in_range(c.hub_position, t)) e.last_assessed_quality = assess_target(t, c.hub_position, params, rng);
  ++t.evaluations;
  if (t.evaluations == kEvaluationsToValue) out.emplace_back(TargetValued{t.id, t.value});
}

void note_discovery(Collective& c, const Entity& e, Target& t, std::vector<EventPayload>& out) {
  if (t.discovered_by.insert(c.id).second) out.emplace_back(Discovery{c.id, t.id, e.id});
}

// Episodic queuing: on a phase change, advocates of other targets drop their
// queued hub messages and leave to reassess.
void clear_queued_messages(Collective& c, TargetId winner, double now) {
  for (auto& e : c.entities) {
    if (e.lost() || !e.in_hub()) continue;
    if (e.pending_report && *e.pending_report != winner) {
      e.pending_report.reset();
      e.dwell_until = now;
      e.errand_until = now;
    }
    if (!e.state.is(Decision::Favoring)) continue;
    if (*e.state.target() == winner) continue;
    e.advocate_until = std::min(e.advocate_until, now);
    e.dwell_until = std::min(e.dwell_until, now);
  }
}

}  // namespace

ModelParams ModelParams::defaults_for(Model m) {
  ModelParams p;
  p.model = m;
  p.episodic_queuing = (m == Model::M2);
  return p;
}

void ModelParams::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(recruit_gain, "recruit_gain");
  positive(reassess_period, "reassess_period");
  positive(interaction_delay_coeff, "interaction_delay_coeff");
  positive(entity_speed, "entity_speed");
  positive(quorum_commit, "quorum_commit");
  positive(quorum_execute, "quorum_execute");
  positive(explore_mean, "explore_mean");
  positive(hub_rest, "hub_rest");
  positive(detect_radius, "detect_radius");
  positive(assess_duration, "assess_duration");
  positive(advocacy_exponent, "advocacy_exponent");
  if (interaction_frequency_mult < 1.0) throw ConfigError("interaction_frequency_mult must be >= 1");
  if (value_noise_sigma < 0.0) throw ConfigError("value_noise_sigma must be non-negative");
  if (!(quorum_commit < quorum_execute) || quorum_execute > 1.0)
    throw ConfigError("quorum thresholds must satisfy commit < execute <= 1");
}

Collective Collective::create(CollectiveId id, Vec2 hub, Model model, int population) {
  Collective c;
  c.id = id;
  c.hub_position = hub;
  c.previous_hub = hub;
  c.model = model;
  c.entities.resize(static_cast<std::size_t>(population));
  for (int i = 0; i < population; ++i) {
    auto& e = c.entities[static_cast<std::size_t>(i)];
    e.id = i;
    e.position = hub;
  }
  return c;
}

int Collective::live_population() const {
  return static_cast<int>(std::count_if(entities.begin(), entities.end(), [](const Entity& e) { return !e.lost(); }));
}

int Collective::support_for(TargetId t) const {
  const auto it = support.find(t);
  return it == support.end() ? 0 : it->second;
}

double Collective::support_fraction(TargetId t) const {
  const int live = live_population();
  return live == 0 ? 0.0 : static_cast<double>(support_for(t)) / live;
}

std::array<int, 4> Collective::state_counts() const {
  std::array<int, 4> counts{};
  for (const auto& e : entities) ++counts[static_cast<std::size_t>(e.state.decision())];
  return counts;
}

std::map<TargetId, int> Collective::recompute_support() const {
  std::map<TargetId, int> s;
  for (const auto& e : entities)
    if (!e.lost() && e.state.advocates()) ++s[*e.state.target()];
  return s;
}

void Collective::set_state(std::size_t index, EntityState next, TransitionCause cause,
                           std::vector<EventPayload>& out) {
  Entity& e = entities.at(index);
  if (e.lost()) throw std::logic_error("lost entities never change decision state");
  if (e.state == next) return;
  if (e.state.advocates()) {
    auto it = support.find(*e.state.target());
    if (--it->second == 0) support.erase(it);
  }
  if (next.advocates()) ++support[*next.target()];
  out.emplace_back(EntityTransition{id, e.id, e.state, next, cause});
  e.state = next;
}

void Collective::mark_lost(std::size_t index, std::vector<EventPayload>& out) {
  Entity& e = entities.at(index);
  if (e.lost()) return;
  if (e.state.advocates()) {
    auto it = support.find(*e.state.target());
    if (--it->second == 0) support.erase(it);
  }
  e.errand = Errand::Lost;
  e.waypoint = e.position;
  out.emplace_back(EntityLost{id, e.id});
}

void Collective::set_phase(Phase next, std::vector<EventPayload>& out) {
  if (phase == next) return;
  out.emplace_back(PhaseChange{id, phase, next});
  phase = next;
}

double interaction_delay(double distance, const ModelParams& params) {
  if (distance < 0.0) throw DomainError("interaction_delay: negative distance");
  if (!params.delay_active()) return 0.0;
  return params.interaction_delay_coeff * std::max(0.0, kDelayMaxDistance - distance);
}

double assess_target(const Target& target, Vec2 hub_position, const ModelParams& params, Rng& rng) {
  if (!in_range(hub_position, target))
    throw DomainError("target " + std::to_string(to_int(target.id)) + " outside search range");
  double quality = static_cast<double>(target.value) / 100.0;
  if (params.value_noise_sigma > 0.0) {
    quality += std::normal_distribution<double>(0.0, params.value_noise_sigma)(rng);
    quality = std::clamp(quality, 0.0, 1.0);
  }
  return quality;
}

std::optional<EntityState> recruit(const Entity& advocate, const Entity& listener, double quality,
                                   const ModelParams& params, Rng& rng, double now) {
  if (!advocate.in_hub() || !listener.in_hub() || advocate.lost() || listener.lost()) return std::nullopt;
  if (!advocate.state.advocates() || !listener.state.is(Decision::Uncommitted)) return std::nullopt;
  if (now < advocate.dwell_until) return std::nullopt;
  const double p = std::min(1.0, params.recruit_gain * params.frequency() * quality);
  if (!bernoulli(rng, p)) return std::nullopt;
  return EntityState::favoring(*advocate.state.target());
}

std::optional<EntityState> commit_via_contact(const Entity& committed, const Entity& other) {
  if (!committed.state.is(Decision::Committed) || committed.lost() || other.lost()) return std::nullopt;
  const TargetId t = *committed.state.target();
  if (other.state.is(Decision::Uncommitted) || other.state == EntityState::favoring(t))
    return EntityState::committed(t);
  return std::nullopt;
}

void begin_execution(Collective& c, const Target& target, const ModelParams& params, double now,
                     std::vector<EventPayload>& out, TransitionCause cause) {
  c.set_phase(Phase::executing(target.id), out);
  c.decide_locked = true;
  c.previous_hub = c.hub_position;
  c.execute_destination = target.position;
  c.arrival_time = now + distance(c.hub_position, target.position) / params.entity_speed;
  for (std::size_t i = 0; i < c.entities.size(); ++i) {
    Entity& e = c.entities[i];
    if (e.lost()) continue;
    e.away_at_execute = !e.in_hub();
    c.set_state(i, EntityState::executing(target.id), cause, out);
    head_to(e, target.id);
  }
}

std::optional<Phase> detect_quorum(Collective& c, const std::vector<Target>& targets, const ModelParams& params,
                                   double now, std::vector<EventPayload>& out) {
  if (c.idle || c.phase.kind == PhaseKind::Executing || c.phase.kind == PhaseKind::Decided) return std::nullopt;
  const Phase before = c.phase;
  const int live = c.live_population();
  const int commit_at = threshold_count(params.quorum_commit, live);
  const int execute_at = threshold_count(params.quorum_execute, live);

  if (c.phase.kind == PhaseKind::Deliberating) {
    std::optional<TargetId> leader;
    int best = 0;
    for (const auto& [t, n] : c.support) {
      if (n > best) {
        best = n;
        leader = t;
      }
    }
    if (leader && best >= commit_at && live > 0) {
      c.set_phase(Phase::committed(*leader), out);
      if (!c.commit_time) c.commit_time = now;
      for (std::size_t i = 0; i < c.entities.size(); ++i) {
        Entity& e = c.entities[i];
        if (e.lost() || e.state != EntityState::favoring(*leader)) continue;
        c.set_state(i, EntityState::committed(*leader), TransitionCause::Quorum, out);
        if (!e.in_hub()) e.errand = Errand::Returning;
      }
      if (params.queuing_active()) clear_queued_messages(c, *leader, now);
    }
  }

  if (c.phase.kind == PhaseKind::Committed && params.autonomous_consensus()) {
    const TargetId t = c.phase.target;
    if (c.support_for(t) >= execute_at && live > 0) {
      const Target* target = find_target(targets, t);
      if (target == nullptr) throw std::logic_error("quorum on unknown target");
      begin_execution(c, *target, params, now, out, TransitionCause::Quorum);
    }
  }

  if (c.phase == before) return std::nullopt;
  return c.phase;
}

void step_entity(Collective& c, std::size_t index, std::vector<Target>& targets, const ModelParams& params, Rng& rng,
                 double now, double dt, std::vector<EventPayload>& out) {
  Entity& e = c.entities[index];
  const double step = params.entity_speed * dt;

  switch (e.errand) {
    case Errand::Lost: {
      if (e.position == e.waypoint) e.waypoint = random_point_in_disk(e.position, 50.0, rng);
      e.position = move_toward(e.position, e.waypoint, step);
      return;
    }
    case Errand::InHub: {
      e.position = c.hub_position;
      if (c.idle) return;
      if (e.pending_report) {
        if (!e.state.is(Decision::Uncommitted)) {
          e.pending_report.reset();
        } else if (now >= e.dwell_until) {
          deliver_report(c, index, find_target(targets, *e.pending_report), params, rng, now, out);
        }
        return;
      }
      if (e.state.is(Decision::Uncommitted) && now >= e.errand_until) {
        e.errand = Errand::Exploring;
        e.errand_until = now + exponential(rng, params.explore_mean);
        e.waypoint = random_point_in_disk(c.hub_position, kSearchRange, rng);
        e.visiting.reset();
      } else if (e.state.is(Decision::Favoring) && now >= e.advocate_until) {
        head_to(e, *e.state.target());
      }
      return;
    }
    case Errand::Exploring: {
      if (e.position == e.waypoint) e.waypoint = random_point_in_disk(c.hub_position, kSearchRange, rng);
      e.position = move_toward(e.position, e.waypoint, step);
      for (auto& t : targets) {
        if (t.occupied || !in_range(c.hub_position, t)) continue;
        if (distance(e.position, t.position) > params.detect_radius) continue;
        note_discovery(c, e, t, out);
        e.visiting = t.id;
        e.errand = Errand::AssessingTarget;
        e.errand_until = now + params.assess_duration;
        return;
      }
      if (now >= e.errand_until) e.errand = Errand::Returning;
      return;
    }
    case Errand::TravelingToTarget: {
      if (e.state.is(Decision::Executing)) {
        e.position = move_toward(e.position, c.execute_destination, step);
        return;
      }
      Target* t = e.visiting ? find_target(targets, *e.visiting) : nullptr;
      if (t == nullptr || t->occupied) {
        e.errand = Errand::Returning;
        return;
      }
      e.position = move_toward(e.position, t->position, step);
      if (e.position == t->position) {
        note_discovery(c, e, *t, out);
        e.errand = Errand::AssessingTarget;
        e.errand_until = now + params.assess_duration;
      }
      return;
    }
    case Errand::AssessingTarget: {
      if (now < e.errand_until) return;
      Target* t = e.visiting ? find_target(targets, *e.visiting) : nullptr;
      if (t != nullptr && !t->occupied) record_assessment(c, e, *t, params, rng, out);
      e.errand = Errand::Returning;
      return;
    }
    case Errand::Returning: {
      e.position = move_toward(e.position, c.hub_position, step);
      if (e.position == c.hub_position) arrive_at_hub(c, index, targets, params, rng, now, out);
      return;
    }
  }
}

void hub_interactions(Collective& c, const std::vector<Target>& targets, const ModelParams& params, Rng& rng,
                      double now, std::vector<EventPayload>& out) {
  if (!params.autonomous_consensus() || c.idle) return;
  if (c.phase.kind == PhaseKind::Executing || c.phase.kind == PhaseKind::Decided) return;

  std::vector<std::size_t> present;
  present.reserve(c.entities.size());
  for (std::size_t i = 0; i < c.entities.size(); ++i)
    if (c.entities[i].in_hub()) present.push_back(i);
  std::shuffle(present.begin(), present.end(), rng);

  const auto interact = [&](std::size_t from, std::size_t to) -> bool {
    const Entity& a = c.entities[from];
    const Entity& b = c.entities[to];
    if (c.phase.kind == PhaseKind::Committed && a.state == EntityState::committed(c.phase.target)) {
      if (auto next = commit_via_contact(a, b)) {
        c.set_state(to, *next, TransitionCause::CommitContact, out);
        c.entities[to].errand_until = now;
        return true;
      }
    }
    if (!a.advocating_at(now) || !b.state.is(Decision::Uncommitted)) return false;
    const TargetId t = *a.state.target();
    const Target* target = find_target(targets, t);
    if (!target_available(c, target)) return false;
    const double q = a.last_assessed_quality.value_or(static_cast<double>(target->value) / 100.0);
    if (auto next = recruit(a, b, q, params, rng, now)) {
      c.set_state(to, *next, TransitionCause::Recruit, out);
      head_to(c.entities[to], t);
      return true;
    }
    return false;
  };

  for (std::size_t k = 0; k + 1 < present.size(); k += 2) {
    if (!interact(present[k], present[k + 1])) interact(present[k + 1], present[k]);
  }
}

void release_target(Collective& c, TargetId target, std::vector<EventPayload>& out) {
  for (std::size_t i = 0; i < c.entities.size(); ++i) {
    Entity& e = c.entities[i];
    if (e.lost() || !e.state.advocates(target)) continue;
    c.set_state(i, EntityState::uncommitted(), TransitionCause::TargetLost, out);
    if (!e.in_hub()) e.errand = Errand::Returning;
    e.visiting.reset();
  }
  if (c.phase == Phase::committed(target)) {
    c.set_phase(Phase::deliberating(), out);
    c.commit_time.reset();
  }
}

void step_collective(Collective& c, std::vector<Target>& targets, const ModelParams& params, Rng& rng, double now,
                     double dt, std::vector<EventPayload>& out) {
  if (c.idle) return;
  for (std::size_t i = 0; i < c.entities.size(); ++i) step_entity(c, i, targets, params, rng, now, dt, out);
  hub_interactions(c, targets, params, rng, now, out);
  detect_quorum(c, targets, params, now, out);
}

const Target* find_target(const std::vector<Target>& targets, TargetId id) {
  for (const auto& t : targets)
    if (t.id == id) return &t;
  return nullptr;
}

Target* find_target(std::vector<Target>& targets, TargetId id) {
  for (auto& t : targets)
    if (t.id == id) return &t;
  return nullptr;
}

bool in_range(Vec2 hub, Vec2 point) { return distance(hub, point) <= kSearchRange; }

bool in_range(Vec2 hub, const Target& target) { return in_range(hub, target.position); }

}  // namespace hubsim
