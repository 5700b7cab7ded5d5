#include "hubsim/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "hubsim/world.hpp"

namespace hubsim {
namespace {

std::string describe(const OperatorCommand& cmd) {
  std::string s = std::string(to_string(cmd.kind)) + " for Collective " + roman_label(cmd.collective);
  if (cmd.target) s += " on Target " + std::to_string(to_int(*cmd.target));
  if (cmd.assignment_id) s += " (assignment " + std::to_string(*cmd.assignment_id) + ")";
  return s;
}

Verdict illegal(const OperatorCommand& cmd, IllegalCause cause, const std::string& reason) {
  return Verdict::illegal(cause, "Illegal " + describe(cmd) + ": " + reason);
}

}  // namespace

int AssignmentLog::add(const OperatorCommand& cmd) {
  const int id = next_id_++;
  items_.push_back(Assignment{id, cmd, AssignmentStatus::Active});
  return id;
}

const Assignment* AssignmentLog::find(int id) const {
  const auto it = std::find_if(items_.begin(), items_.end(), [id](const Assignment& a) { return a.id == id; });
  return it == items_.end() ? nullptr : &*it;
}

Assignment* AssignmentLog::find(int id) {
  const auto it = std::find_if(items_.begin(), items_.end(), [id](const Assignment& a) { return a.id == id; });
  return it == items_.end() ? nullptr : &*it;
}

std::vector<Assignment> AssignmentLog::for_collective(CollectiveId c) const {
  std::vector<Assignment> out;
  for (const auto& a : items_)
    if (a.command.collective == c) out.push_back(a);
  return out;
}

void AssignmentLog::clear_collective(CollectiveId c) {
  std::erase_if(items_, [c](const Assignment& a) { return a.command.collective == c; });
}

Collective* find_collective(std::vector<Collective>& collectives, CollectiveId id) {
  for (auto& c : collectives)
    if (c.id == id) return &c;
  return nullptr;
}

const Collective* find_collective(const std::vector<Collective>& collectives, CollectiveId id) {
  for (const auto& c : collectives)
    if (c.id == id) return &c;
  return nullptr;
}

Verdict validate_command(const OperatorCommand& cmd, const std::vector<Collective>& collectives,
                         const std::vector<Target>& targets, const AssignmentLog& assignments,
                         const ModelParams& params) {
  const Collective* c = find_collective(collectives, cmd.collective);
  if (c == nullptr) return illegal(cmd, IllegalCause::Other, "unknown collective");
  if (c->decide_locked) return illegal(cmd, IllegalCause::DecideLocked, "collective has already decided");

  if (cmd.kind == CommandKind::CancelAbandon) {
    if (!cmd.assignment_id) return illegal(cmd, IllegalCause::Other, "no assignment referenced");
    const Assignment* a = assignments.find(*cmd.assignment_id);
    if (a == nullptr || a->command.collective != cmd.collective)
      return illegal(cmd, IllegalCause::Other, "assignment not found");
    if (a->command.kind != CommandKind::Abandon)
      return illegal(cmd, IllegalCause::Other, "only abandon commands can be cancelled");
    if (a->status != AssignmentStatus::Active) return illegal(cmd, IllegalCause::Other, "assignment is not active");
    return Verdict::accept();
  }

  if (!cmd.target) return illegal(cmd, IllegalCause::Other, "no target referenced");
  const Target* t = find_target(targets, *cmd.target);
  if (t == nullptr || !t->discovered()) return illegal(cmd, IllegalCause::Other, "unknown target");
  if (t->occupied) return illegal(cmd, IllegalCause::Other, "target is occupied");

  switch (cmd.kind) {
    case CommandKind::Investigate:
      if (!in_range(c->hub_position, *t)) return illegal(cmd, IllegalCause::OutOfRange, "target outside search range");
      if (!t->valued()) return illegal(cmd, IllegalCause::UnvaluedTarget, "target has no assigned value");
      if (c->abandoned.contains(t->id)) return illegal(cmd, IllegalCause::Other, "target is abandoned");
      return Verdict::accept();
    case CommandKind::Abandon:
      if (!t->valued()) return illegal(cmd, IllegalCause::UnvaluedTarget, "target has no assigned value");
      return Verdict::accept();
    case CommandKind::Decide: {
      const int needed = threshold_count(params.quorum_commit, c->live_population());
      if (c->support_for(t->id) < needed || needed == 0)
        return illegal(cmd, IllegalCause::InsufficientSupport, "less than 30% of the collective supports the target");
      return Verdict::accept();
    }
    case CommandKind::CancelAbandon:
      break;
  }
  return illegal(cmd, IllegalCause::Other, "unsupported command");
}

int apply_investigate(Collective& c, TargetId target, Rng& rng, std::vector<EventPayload>& out) {
  const int quota = static_cast<int>(std::floor(kInvestigateFraction * c.live_population() + 1e-9));
  std::vector<std::size_t> in_hub;
  std::vector<std::size_t> away;
  for (std::size_t i = 0; i < c.entities.size(); ++i) {
    const Entity& e = c.entities[i];
    if (e.lost() || !e.state.is(Decision::Uncommitted)) continue;
    (e.in_hub() ? in_hub : away).push_back(i);
  }
  std::shuffle(in_hub.begin(), in_hub.end(), rng);
  std::shuffle(away.begin(), away.end(), rng);
  in_hub.insert(in_hub.end(), away.begin(), away.end());

  const int n = std::min(quota, static_cast<int>(in_hub.size()));
  for (int k = 0; k < n; ++k) {
    const std::size_t i = in_hub[static_cast<std::size_t>(k)];
    c.set_state(i, EntityState::favoring(target), TransitionCause::Investigate, out);
    Entity& e = c.entities[i];
    e.errand = Errand::TravelingToTarget;
    e.visiting = target;
    e.pending_report.reset();
  }
  return n;
}

int apply_abandon(Collective& c, TargetId target, std::vector<EventPayload>& out) {
  const bool committed_target = c.phase == Phase::committed(target);
  int n = 0;
  for (std::size_t i = 0; i < c.entities.size(); ++i) {
    const Entity& e = c.entities[i];
    if (e.lost()) continue;
    const bool demote = e.state == EntityState::favoring(target) ||
                        (committed_target && e.state == EntityState::committed(target));
    if (!demote) continue;
    c.set_state(i, EntityState::uncommitted(), TransitionCause::Abandon, out);
    ++n;
  }
  if (committed_target) {
    c.set_phase(Phase::deliberating(), out);
    c.commit_time.reset();
  }
  c.abandoned.insert(target);
  return n;
}

void apply_decide(Collective& c, const Target& target, const ModelParams& params, double now,
                  std::vector<EventPayload>& out) {
  begin_execution(c, target, params, now, out, TransitionCause::Decide);
  c.operator_decided = true;
  c.decide_time = now;
}

Assignment cancel_abandon(AssignmentLog& log, int assignment_id, std::vector<Collective>& collectives) {
  Assignment* a = log.find(assignment_id);
  if (a == nullptr) throw AssignmentNotFound("assignment " + std::to_string(assignment_id) + " not found");
  if (a->command.kind != CommandKind::Abandon) throw CancelRejected("only abandon commands can be cancelled");
  if (a->status != AssignmentStatus::Active) throw CancelRejected("assignment is not active");
  a->status = AssignmentStatus::Cancelled;
  if (Collective* c = find_collective(collectives, a->command.collective)) c->abandoned.erase(*a->command.target);
  return *a;
}

CommandResult process_command(OperatorDesk& desk, const OperatorCommand& cmd, std::vector<Collective>& collectives,
                              std::vector<Target>& targets, const ModelParams& params, Rng& rng, double now,
                              std::vector<EventPayload>& out) {
  CommandResult result;
  result.command = cmd;
  result.verdict = validate_command(cmd, collectives, targets, desk.assignments, params);

  Collective* c = find_collective(collectives, cmd.collective);
  if (c != nullptr) {
    result.live_population = c->live_population();
    result.decision_index = c->decisions_made + 1;
    if (cmd.target) {
      result.support = c->support_for(*cmd.target);
      if (const Target* t = find_target(targets, *cmd.target))
        result.highest_value_target = t->value == ground_truth_best_value(targets, c->hub_position);
    }
  }

  if (!result.verdict.accepted) {
    desk.messages.push_back(SystemMessage{now, Severity::Illegal, result.verdict.text, result.verdict.cause});
    return result;
  }

  switch (cmd.kind) {
    case CommandKind::Investigate: {
      const int id = desk.assignments.add(cmd);
      apply_investigate(*c, *cmd.target, rng, out);
      desk.assignments.find(id)->status = AssignmentStatus::Completed;
      result.assignment_id = id;
      break;
    }
    case CommandKind::Abandon:
      result.assignment_id = desk.assignments.add(cmd);
      apply_abandon(*c, *cmd.target, out);
      break;
    case CommandKind::Decide:
      result.assignment_id = desk.assignments.add(cmd);
      apply_decide(*c, *find_target(targets, *cmd.target), params, now, out);
      break;
    case CommandKind::CancelAbandon: {
      const Assignment cancelled = cancel_abandon(desk.assignments, *cmd.assignment_id, collectives);
      result.assignment_id = cancelled.id;
      result.support = c->support_for(*cancelled.command.target);
      break;
    }
  }
  return result;
}

}  // namespace hubsim
