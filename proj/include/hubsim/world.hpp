#pragma once

#include <cstdint>
#include <vector>

#include "hubsim/collective.hpp"
#include "hubsim/events.hpp"
#include "hubsim/rng.hpp"
#include "hubsim/target.hpp"

namespace hubsim {

// Values at or above this sit in the top quarter of [67, 100].
constexpr int kTopQuartileValue = 92;

struct TrialConfig {
  Difficulty difficulty{Difficulty::Easy};
  int n_targets{16};
  int n_collectives{4};
  int population{kDefaultPopulation};
  double range{kSearchRange};
  std::uint64_t seed{1};
  int decisions_per_collective{2};
  double component_time_limit{600.0};
  int decision_cap_on_timeout{6};
  double p_lost{0.02};
  // Headless safety stop; decision times themselves are unbounded.
  double max_component_duration{2400.0};
  double hub_spacing{800.0};

  void validate() const;
  int total_decisions() const { return n_collectives * decisions_per_collective; }
};

struct WorldLayout {
  std::vector<Vec2> hubs;
  std::vector<Target> targets;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hubs on a 2x2 grid and 16 targets satisfying the difficulty predicates.
WorldLayout generate_trial(const TrialConfig& config, Rng& rng);

// Predicates the generator guarantees; exposed for property checks.
bool easy_predicate(const WorldLayout& w);
bool hard_predicate(const WorldLayout& w);
bool coverage_predicate(const WorldLayout& w);

struct MoveOutcome {
  MoveOutcomeKind kind{MoveOutcomeKind::Established};
  CollectiveId collective{};
  TargetId target{};
  Vec2 previous_hub{};

  bool established() const { return kind == MoveOutcomeKind::Established; }
};

// Hub arrival. First arrival on an unoccupied target establishes there; a
// later arrival returns to its previous hub. Either way the decision counts.
// Entities that were away when execution began are lost with probability p_lost.
MoveOutcome resolve_hub_move(Collective& mover, Target& target, std::vector<Collective>& registry, double p_lost,
                             Rng& rng, std::vector<EventPayload>& out);

struct TrialProgress {
  double component_start{0.0};
  int decisions{0};
  int total_decisions{8};
  double time_limit{600.0};
  int cap_on_timeout{6};

  // 8 decisions, or at least 6 once the component has run past the limit.
  bool should_end(double now) const;
};

struct DecisionAdvance {
  bool trial_ended{false};
  bool collective_done{false};
  int next_index{0};  // 1-based index of the collective's next decision
};

// Bookkeeping after a collective completes a decision: resets it to
// Deliberating (or idles it when its budget is spent) and checks termination.
DecisionAdvance advance_decision(Collective& collective, TrialProgress& progress, int decisions_per_collective,
                                 double now, std::vector<EventPayload>& out);

// Highest value among unoccupied targets in range of `hub`.
int ground_truth_best_value(const std::vector<Target>& targets, Vec2 hub);

}  // namespace hubsim
