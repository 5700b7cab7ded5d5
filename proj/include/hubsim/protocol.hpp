#pragma once

#include <stdexcept>
#include <vector>

#include "hubsim/collective.hpp"
#include "hubsim/command.hpp"
#include "hubsim/events.hpp"
#include "hubsim/rng.hpp"

namespace hubsim {

// Fraction of the live population moved to Favoring by one investigate.
constexpr double kInvestigateFraction = 0.05;

class AssignmentLog {
 public:
  int add(const OperatorCommand& cmd);
  const Assignment* find(int id) const;
  Assignment* find(int id);
  std::vector<Assignment> for_collective(CollectiveId c) const;
  const std::vector<Assignment>& all() const { return items_; }
  // Decision completion wipes every assignment of the collective.
  void clear_collective(CollectiveId c);
  int next_id() const { return next_id_; }

 private:
  std::vector<Assignment> items_;
  int next_id_{1};
};

class CancelRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AssignmentNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pure check; never mutates anything.
Verdict validate_command(const OperatorCommand& cmd, const std::vector<Collective>& collectives,
                         const std::vector<Target>& targets, const AssignmentLog& assignments,
                         const ModelParams& params);

// floor(5% of live population) uncommitted entities become Favoring(target);
// in-hub entities are picked first. Returns the number transitioned.
int apply_investigate(Collective& collective, TargetId target, Rng& rng, std::vector<EventPayload>& out);

// Favoring(target) -> Uncommitted and the target joins the abandoned set.
// Abandoning the committed target also demotes its Committed advocates and
// reverts the phase to Deliberating. Returns the number transitioned.
int apply_abandon(Collective& collective, TargetId target, std::vector<EventPayload>& out);

void apply_decide(Collective& collective, const Target& target, const ModelParams& params, double now,
                  std::vector<EventPayload>& out);

// Cancels an active abandon; the target becomes recruitable again but no
// entity re-favors it automatically.
Assignment cancel_abandon(AssignmentLog& log, int assignment_id, std::vector<Collective>& collectives);

// Operator-facing state: assignments and system messages.
struct OperatorDesk {
  AssignmentLog assignments;
  std::vector<SystemMessage> messages;
};

// Validate, apply, and log one command. Illegal commands leave the simulation
// untouched and add exactly one Illegal system message.
CommandResult process_command(OperatorDesk& desk, const OperatorCommand& cmd, std::vector<Collective>& collectives,
                              std::vector<Target>& targets, const ModelParams& params, Rng& rng, double now,
                              std::vector<EventPayload>& out);

Collective* find_collective(std::vector<Collective>& collectives, CollectiveId id);
const Collective* find_collective(const std::vector<Collective>& collectives, CollectiveId id);

}  // namespace hubsim
