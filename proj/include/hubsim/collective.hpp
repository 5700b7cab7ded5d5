#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "hubsim/events.hpp"
#include "hubsim/rng.hpp"
#include "hubsim/state.hpp"
#include "hubsim/target.hpp"
#include "hubsim/types.hpp"

namespace hubsim {

constexpr int kDefaultPopulation = 200;
// Distance at which interaction delay reaches zero.
constexpr double kDelayMaxDistance = 500.0;

struct ModelParams {
  Model model{Model::M2};
  double recruit_gain{0.02};              // advocacy probability per hub contact per unit quality
  double reassess_period{90.0};          // seconds an advocate spends in the hub between reassessments
  double interaction_delay_coeff{0.6};   // s/m, M2 only
  double interaction_frequency_mult{8.0};  // >= 1, M2 only
  bool episodic_queuing{true};           // M2 only
  double entity_speed{5.0};              // m/s
  double quorum_commit{0.30};
  double quorum_execute{0.50};
  double value_noise_sigma{0.0};

  // Exploration and errand timing.
  double explore_mean{60.0};     // mean duration of an exploration trip, s
  double hub_rest{20.0};         // uncommitted rest in the hub between trips, s
  double detect_radius{20.0};    // m
  double assess_duration{3.0};   // s at the target per assessment
  double advocacy_exponent{6.0};  // keep/adopt probability is quality^exponent

  static ModelParams defaults_for(Model m);

  // Throws ConfigError when a scalar is non-positive or quorum ordering fails.
  void validate() const;

  bool delay_active() const { return model == Model::M2; }
  double frequency() const { return model == Model::M2 ? interaction_frequency_mult : 1.0; }
  bool queuing_active() const { return model == Model::M2 && episodic_queuing; }
  bool autonomous_consensus() const { return model != Model::M3; }
};

struct Entity {
  int id{0};
  EntityState state;
  Vec2 position{};
  Errand errand{Errand::InHub};
  double dwell_until{0.0};  // advocacy hold-off after returning to the hub
  std::optional<double> last_assessed_quality;

  // Errand bookkeeping.
  double errand_until{0.0};    // rest / exploration / assessment end
  double advocate_until{0.0};  // end of the current advocacy window
  Vec2 waypoint{};
  std::optional<TargetId> visiting;
  // Discovery report waiting in the hub for the interaction delay to expire.
  std::optional<TargetId> pending_report;
  bool away_at_execute{false};

  bool lost() const { return errand == Errand::Lost; }
  bool in_hub() const { return errand == Errand::InHub; }
  bool advocating_at(double now) const {
    if (!in_hub() || !state.advocates() || now < dwell_until) return false;
    return state.is(Decision::Committed) || now < advocate_until;
  }
};

struct Collective {
  CollectiveId id{};
  Vec2 hub_position{};
  std::vector<Entity> entities;
  std::map<TargetId, int> support;  // live Favoring + Committed per target
  Phase phase;
  std::set<TargetId> abandoned;
  Model model{Model::M2};
  bool decide_locked{false};

  // Decision bookkeeping.
  int decisions_made{0};
  double decision_started{0.0};
  std::optional<double> commit_time;
  std::optional<double> decide_time;
  bool operator_decided{false};
  Vec2 previous_hub{};
  Vec2 execute_destination{};
  double arrival_time{0.0};
  bool idle{false};  // decision budget exhausted

  // Fresh collective of `population` uncommitted entities resting in the hub.
  static Collective create(CollectiveId id, Vec2 hub, Model model, int population = kDefaultPopulation);

  int population() const { return static_cast<int>(entities.size()); }
  int live_population() const;
  int support_for(TargetId t) const;
  double support_fraction(TargetId t) const;

  // Counts indexed by Decision (Uncommitted, Favoring, Committed, Executing).
  std::array<int, 4> state_counts() const;
  std::map<TargetId, int> recompute_support() const;

  // Sole mutation path for decision states; keeps the support ledger exact.
  void set_state(std::size_t index, EntityState next, TransitionCause cause, std::vector<EventPayload>& out);
  void mark_lost(std::size_t index, std::vector<EventPayload>& out);
  void set_phase(Phase next, std::vector<EventPayload>& out);
};

// Zero for M1/M3; otherwise kappa * (500 - distance), floored at zero.
double interaction_delay(double distance, const ModelParams& params);

// Quality in [0,1] from the target's value; throws DomainError when the
// target lies outside the hub's search range.
double assess_target(const Target& target, Vec2 hub_position, const ModelParams& params, Rng& rng);

// New listener state when recruitment fires; nullopt when preconditions fail
// or the draw misses. Consumes randomness only when preconditions hold.
std::optional<EntityState> recruit(const Entity& advocate, const Entity& listener, double quality,
                                   const ModelParams& params, Rng& rng, double now);

// Committed(t) converts Uncommitted and Favoring(t) listeners; never Favoring(t' != t).
std::optional<EntityState> commit_via_contact(const Entity& committed, const Entity& other);

// Applies commit / execute quorum rules. Returns the new phase if it changed.
std::optional<Phase> detect_quorum(Collective& collective, const std::vector<Target>& targets,
                                   const ModelParams& params, double now, std::vector<EventPayload>& out);

// Moves the collective into Executing(t): every live entity heads for the target.
void begin_execution(Collective& collective, const Target& target, const ModelParams& params, double now,
                     std::vector<EventPayload>& out, TransitionCause cause = TransitionCause::Quorum);

// Advances one entity's errand by dt.
void step_entity(Collective& collective, std::size_t index, std::vector<Target>& targets, const ModelParams& params,
                 Rng& rng, double now, double dt, std::vector<EventPayload>& out);

// Random pairing of in-hub entities: commitment contacts and recruitment.
void hub_interactions(Collective& collective, const std::vector<Target>& targets, const ModelParams& params, Rng& rng,
                      double now, std::vector<EventPayload>& out);

// Target became unavailable (occupied elsewhere): drop all advocacy for it.
void release_target(Collective& collective, TargetId target, std::vector<EventPayload>& out);

// One full collective update: entities, hub contacts, quorum detection.
void step_collective(Collective& collective, std::vector<Target>& targets, const ModelParams& params, Rng& rng,
                     double now, double dt, std::vector<EventPayload>& out);

const Target* find_target(const std::vector<Target>& targets, TargetId id);
Target* find_target(std::vector<Target>& targets, TargetId id);

}  // namespace hubsim
