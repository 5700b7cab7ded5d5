#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "hubsim/engine.hpp"

namespace hubsim {

// Human marks a live session operator; the engine scripts nothing for it.
enum class PolicyKind { Null, GreedyBest, ConsensusBoost, Human };

std::string_view to_string(PolicyKind k);
PolicyKind parse_policy(std::string_view s);

// Scripted operator. Policies act only by queueing operator commands.
class OperatorPolicy {
 public:
  virtual ~OperatorPolicy() = default;
  // Called after every tick; commands are applied at the start of the next one.
  virtual void act(const Engine& engine, std::vector<OperatorCommand>& out) = 0;
};

std::unique_ptr<OperatorPolicy> make_policy(PolicyKind kind);

// Seconds between policy decisions.
constexpr double kPolicyPeriod = 1.0;

// Highest-valued unoccupied target in range of `c`, skipping targets another
// collective is already executing toward. Ties go to the lower target id.
const Target* best_available_target(const Engine& engine, const Collective& c);

}  // namespace hubsim
