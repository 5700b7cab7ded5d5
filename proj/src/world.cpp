#include "hubsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hubsim {
namespace {

constexpr int kMaxGenerationAttempts = 200;
constexpr double kMinTargetSeparation = 60.0;

Vec2 polar(Vec2 origin, double radius, double angle) {
  return {origin.x + radius * std::cos(angle), origin.y + radius * std::sin(angle)};
}

int top_value(Rng& rng) { return uniform_int(rng, kTopQuartileValue, kMaxTargetValue); }
int low_value(Rng& rng) { return uniform_int(rng, kMinTargetValue, kTopQuartileValue - 1); }

struct Draft {
  Vec2 position;
  int value;
};

std::vector<Vec2> grid_hubs(double spacing) {
  const double c = spacing * 1.25;
  const double h = spacing / 2.0;
  return {{c - h, c - h}, {c + h, c - h}, {c - h, c + h}, {c + h, c + h}};
}

// Neighbour around the grid cycle 0 -> 1 -> 3 -> 2 -> 0.
int cycle_neighbour(int k) {
  static constexpr int next[] = {1, 3, 0, 2};
  return next[k];
}

std::vector<Draft> draft_targets(const TrialConfig& config, const std::vector<Vec2>& hubs, Rng& rng) {
  Vec2 center{};
  for (auto h : hubs) center = center + h * (1.0 / static_cast<double>(hubs.size()));

  std::vector<Draft> drafts;
  for (int k = 0; k < static_cast<int>(hubs.size()); ++k) {
    const Vec2 hub = hubs[static_cast<std::size_t>(k)];
    const Vec2 out = hub - center;
    const double outward = std::atan2(out.y, out.x);
    const double spread = std::numbers::pi / 3.0;

    if (config.difficulty == Difficulty::Easy) {
      for (int i = 0; i < 2; ++i)
        drafts.push_back({polar(hub, uniform(rng, 100.0, 240.0), outward + uniform(rng, -spread, spread)),
                          top_value(rng)});
      drafts.push_back({polar(hub, uniform(rng, 150.0, 480.0), uniform(rng, 0.0, 2.0 * std::numbers::pi)),
                        low_value(rng)});
    } else {
      drafts.push_back({polar(hub, uniform(rng, 380.0, 480.0), outward + uniform(rng, -spread, spread)),
                        top_value(rng)});
      for (int i = 0; i < 2; ++i)
        drafts.push_back({polar(hub, uniform(rng, 80.0, 250.0), uniform(rng, 0.0, 2.0 * std::numbers::pi)),
                          low_value(rng)});
    }

    // Contested target between this hub and its neighbour.
    const Vec2 other = hubs[static_cast<std::size_t>(cycle_neighbour(k))];
    const Vec2 mid = (hub + other) * 0.5;
    const Vec2 axis = other - hub;
    const Vec2 normal = Vec2{-axis.y, axis.x} * (1.0 / axis.norm());
    const Vec2 along = axis * (1.0 / axis.norm());
    drafts.push_back({mid + normal * uniform(rng, -120.0, 120.0) + along * uniform(rng, -40.0, 40.0), low_value(rng)});
  }
  return drafts;
}

bool separated(const std::vector<Target>& targets) {
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (distance(targets[i].position, targets[j].position) < kMinTargetSeparation) return false;
  return true;
}

}  // namespace

void TrialConfig::validate() const {
  if (n_targets != 16) throw ConfigError("n_targets must be 16 per component");
  if (n_collectives < 1 || n_collectives > 4) throw ConfigError("n_collectives must be in [1, 4]");
  if (population <= 0) throw ConfigError("population must be positive");
  if (!(range > 0.0)) throw ConfigError("range must be positive");
  if (decisions_per_collective <= 0) throw ConfigError("decisions_per_collective must be positive");
  if (!(component_time_limit > 0.0)) throw ConfigError("component_time_limit must be positive");
  if (decision_cap_on_timeout <= 0) throw ConfigError("decision_cap_on_timeout must be positive");
  if (p_lost < 0.0 || p_lost > 1.0) throw ConfigError("p_lost must be in [0, 1]");
  if (!(max_component_duration > 0.0)) throw ConfigError("max_component_duration must be positive");
  if (!(hub_spacing > 0.0)) throw ConfigError("hub_spacing must be positive");
}

bool easy_predicate(const WorldLayout& w) {
  for (auto hub : w.hubs) {
    const auto near_top = std::count_if(w.targets.begin(), w.targets.end(), [&](const Target& t) {
      return t.value >= kTopQuartileValue && distance(hub, t.position) <= 250.0;
    });
    if (near_top < 2) return false;
  }
  return true;
}

bool hard_predicate(const WorldLayout& w) {
  for (auto hub : w.hubs) {
    bool has_far_top = false;
    bool has_decoy = false;
    for (const auto& t : w.targets) {
      const double d = distance(hub, t.position);
      if (t.value >= kTopQuartileValue) {
        if (d < 350.0) return false;
        has_far_top = has_far_top || d <= kSearchRange;
      } else if (d <= 250.0) {
        has_decoy = true;
      }
    }
    if (!has_far_top || !has_decoy) return false;
  }
  return true;
}

bool coverage_predicate(const WorldLayout& w) {
  for (auto hub : w.hubs) {
    const auto n = std::count_if(w.targets.begin(), w.targets.end(), [&](const Target& t) { return in_range(hub, t); });
    if (n < 2) return false;
  }
  if (w.hubs.size() < 2) return true;
  return std::any_of(w.targets.begin(), w.targets.end(), [&](const Target& t) {
    return std::count_if(w.hubs.begin(), w.hubs.end(), [&](Vec2 h) { return in_range(h, t); }) >= 2;
  });
}

WorldLayout generate_trial(const TrialConfig& config, Rng& rng) {
  config.validate();
  if (config.n_collectives != 4) throw GenerationError("generator lays out exactly four hubs");

  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    WorldLayout w;
    w.hubs = grid_hubs(config.hub_spacing);
    auto drafts = draft_targets(config, w.hubs, rng);

    // Shuffle so target labels carry no information about their role.
    std::vector<int> labels(drafts.size());
    std::iota(labels.begin(), labels.end(), 1);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      Target t;
      t.id = target_id(labels[i]);
      t.position = drafts[i].position;
      t.value = drafts[i].value;
      w.targets.push_back(t);
    }
    std::sort(w.targets.begin(), w.targets.end(), [](const Target& a, const Target& b) { return a.id < b.id; });

    const bool difficulty_ok = config.difficulty == Difficulty::Easy ? easy_predicate(w) : hard_predicate(w);
    if (difficulty_ok && coverage_predicate(w) && separated(w.targets)) return w;
  }
  throw GenerationError("no feasible target placement after bounded retries");
}

MoveOutcome resolve_hub_move(Collective& mover, Target& target, std::vector<Collective>& registry, double p_lost,
                             Rng& rng, std::vector<EventPayload>& out) {
  MoveOutcome outcome;
  outcome.collective = mover.id;
  outcome.target = target.id;
  outcome.previous_hub = mover.previous_hub;

  if (!target.occupied) {
    outcome.kind = MoveOutcomeKind::Established;
    target.occupied = true;
    mover.hub_position = target.position;
    for (auto& other : registry)
      if (other.id != mover.id) release_target(other, target.id, out);
  } else {
    outcome.kind = MoveOutcomeKind::Returned;
    mover.hub_position = mover.previous_hub;
  }
  out.emplace_back(HubMove{mover.id, outcome.kind, target.id, mover.previous_hub, mover.hub_position});

  for (std::size_t i = 0; i < mover.entities.size(); ++i) {
    Entity& e = mover.entities[i];
    if (e.lost()) continue;
    if (e.away_at_execute && bernoulli(rng, p_lost)) {
      mover.mark_lost(i, out);
      continue;
    }
    e.position = mover.hub_position;
    e.errand = Errand::InHub;
    e.away_at_execute = false;
  }
  return outcome;
}

bool TrialProgress::should_end(double now) const {
  if (decisions >= total_decisions) return true;
  return decisions >= cap_on_timeout && (now - component_start) > time_limit;
}

DecisionAdvance advance_decision(Collective& c, TrialProgress& progress, int decisions_per_collective, double now,
                                 std::vector<EventPayload>& out) {
  ++c.decisions_made;
  ++progress.decisions;

  const TargetId decided = c.phase.target;
  for (std::size_t i = 0; i < c.entities.size(); ++i) {
    Entity& e = c.entities[i];
    if (e.lost()) continue;
    c.set_state(i, EntityState::uncommitted(), TransitionCause::Reset, out);
    e.errand = Errand::InHub;
    e.position = c.hub_position;
    e.errand_until = now;
    e.dwell_until = now;
    e.advocate_until = now;
    e.visiting.reset();
    e.pending_report.reset();
    e.last_assessed_quality.reset();
  }
  c.abandoned.clear();
  c.support.clear();
  c.decide_locked = false;
  c.commit_time.reset();
  c.decide_time.reset();
  c.operator_decided = false;
  c.previous_hub = c.hub_position;
  c.decision_started = now;

  DecisionAdvance adv;
  if (c.decisions_made >= decisions_per_collective) {
    c.idle = true;
    c.decide_locked = true;
    c.set_phase(Phase::decided(decided), out);
    adv.collective_done = true;
  } else {
    c.set_phase(Phase::deliberating(), out);
    adv.next_index = c.decisions_made + 1;
  }
  adv.trial_ended = progress.should_end(now);
  return adv;
}

int ground_truth_best_value(const std::vector<Target>& targets, Vec2 hub) {
  int best = 0;
  for (const auto& t : targets)
    if (!t.occupied && in_range(hub, t)) best = std::max(best, t.value);
  return best;
}

}  // namespace hubsim
