#pragma once

#include <optional>
#include <string>

#include "hubsim/types.hpp"

namespace hubsim {

enum class Decision { Uncommitted, Favoring, Committed, Executing };

// Decision state of one entity. Every non-Uncommitted state names exactly one target.
class EntityState {
 public:
  constexpr EntityState() = default;

  static constexpr EntityState uncommitted() { return EntityState(); }
  static constexpr EntityState favoring(TargetId t) { return EntityState(Decision::Favoring, t); }
  static constexpr EntityState committed(TargetId t) { return EntityState(Decision::Committed, t); }
  static constexpr EntityState executing(TargetId t) { return EntityState(Decision::Executing, t); }

  constexpr Decision decision() const { return decision_; }
  constexpr bool is(Decision d) const { return decision_ == d; }

  constexpr std::optional<TargetId> target() const {
    if (decision_ == Decision::Uncommitted) return std::nullopt;
    return target_;
  }

  // Favoring and Committed entities count toward a target's support.
  constexpr bool advocates() const { return decision_ == Decision::Favoring || decision_ == Decision::Committed; }
  constexpr bool advocates(TargetId t) const { return advocates() && target_ == t; }

  friend constexpr bool operator==(const EntityState&, const EntityState&) = default;

 private:
  constexpr EntityState(Decision d, TargetId t) : decision_(d), target_(t) {}

  Decision decision_{Decision::Uncommitted};
  TargetId target_{};
};

std::string to_string(Decision d);
std::string to_string(const EntityState& s);
EntityState parse_entity_state(const std::string& s);

enum class Errand { InHub, Exploring, TravelingToTarget, AssessingTarget, Returning, Lost };

std::string_view to_string(Errand e);

enum class PhaseKind { Deliberating, Committed, Executing, Decided };

struct Phase {
  PhaseKind kind{PhaseKind::Deliberating};
  TargetId target{};

  static constexpr Phase deliberating() { return {}; }
  static constexpr Phase committed(TargetId t) { return {PhaseKind::Committed, t}; }
  static constexpr Phase executing(TargetId t) { return {PhaseKind::Executing, t}; }
  static constexpr Phase decided(TargetId t) { return {PhaseKind::Decided, t}; }

  friend constexpr bool operator==(const Phase& a, const Phase& b) {
    if (a.kind != b.kind) return false;
    return a.kind == PhaseKind::Deliberating || a.target == b.target;
  }
};

std::string to_string(const Phase& p);
Phase parse_phase(const std::string& s);

}  // namespace hubsim
