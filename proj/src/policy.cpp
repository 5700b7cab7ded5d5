#include "hubsim/policy.hpp"

#include <set>

namespace hubsim {
namespace {

bool policy_tick(const Engine& engine) {
  const auto period = static_cast<std::int64_t>(kPolicyPeriod / kTickSeconds + 0.5);
  return engine.tick() % period == 0;
}

bool actionable(const Collective& c) { return !c.idle && !c.decide_locked; }

OperatorCommand command(CommandKind kind, const Collective& c, TargetId t) {
  OperatorCommand cmd;
  cmd.kind = kind;
  cmd.collective = c.id;
  cmd.target = t;
  return cmd;
}

class NullPolicy final : public OperatorPolicy {
 public:
  void act(const Engine&, std::vector<OperatorCommand>&) override {}
};

// Investigate the ground-truth best target until the decide threshold is met, then decide.
class GreedyBestPolicy final : public OperatorPolicy {
 public:
  void act(const Engine& engine, std::vector<OperatorCommand>& out) override {
    if (!policy_tick(engine)) return;
    const auto& params = engine.scenario().params;
    for (const auto& c : engine.collectives()) {
      if (!actionable(c)) continue;
      const Target* best = best_available_target(engine, c);
      if (best == nullptr || !best->valued()) continue;
      const int needed = threshold_count(params.quorum_commit, c.live_population());
      if (c.support_for(best->id) >= needed) {
        out.push_back(command(CommandKind::Decide, c, best->id));
      } else {
        if (c.abandoned.contains(best->id)) continue;
        out.push_back(command(CommandKind::Investigate, c, best->id));
      }
    }
  }
};

// One investigate on the best target per decision, then decide as soon as the collective commits.
class ConsensusBoostPolicy final : public OperatorPolicy {
 public:
  void act(const Engine& engine, std::vector<OperatorCommand>& out) override {
    if (!policy_tick(engine)) return;
    if (engine.component() != component_) {
      component_ = engine.component();
      boosted_.clear();
    }
    for (const auto& c : engine.collectives()) {
      if (!actionable(c)) continue;
      if (c.phase.kind == PhaseKind::Committed) {
        out.push_back(command(CommandKind::Decide, c, c.phase.target));
        continue;
      }
      const auto key = std::make_pair(to_int(c.id), c.decisions_made);
      if (boosted_.contains(key)) continue;
      const Target* best = best_available_target(engine, c);
      if (best == nullptr || !best->valued()) continue;
      out.push_back(command(CommandKind::Investigate, c, best->id));
      boosted_.insert(key);
    }
  }

 private:
  int component_{-1};
  std::set<std::pair<int, int>> boosted_;
};

}  // namespace

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Null: return "null";
    case PolicyKind::GreedyBest: return "greedy-best";
    case PolicyKind::ConsensusBoost: return "consensus-boost";
    case PolicyKind::Human: return "human";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view s) {
  if (s == "null" || s == "Null" || s == "none") return PolicyKind::Null;
  if (s == "greedy-best" || s == "GreedyBest" || s == "greedy") return PolicyKind::GreedyBest;
  if (s == "consensus-boost" || s == "ConsensusBoost" || s == "boost") return PolicyKind::ConsensusBoost;
  if (s == "human") return PolicyKind::Human;
  throw ConfigError("unknown policy: " + std::string(s));
}

std::unique_ptr<OperatorPolicy> make_policy(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Null:
    case PolicyKind::Human: return std::make_unique<NullPolicy>();
    case PolicyKind::GreedyBest: return std::make_unique<GreedyBestPolicy>();
    case PolicyKind::ConsensusBoost: return std::make_unique<ConsensusBoostPolicy>();
  }
  throw ConfigError("unknown policy");
}

const Target* best_available_target(const Engine& engine, const Collective& c) {
  std::set<TargetId> claimed;
  for (const auto& other : engine.collectives())
    if (other.id != c.id && other.phase.kind == PhaseKind::Executing) claimed.insert(other.phase.target);

  const Target* best = nullptr;
  for (const auto& t : engine.targets()) {
    if (t.occupied || claimed.contains(t.id) || !in_range(c.hub_position, t)) continue;
    if (best == nullptr || t.value > best->value) best = &t;
  }
  return best;
}

}  // namespace hubsim
