#pragma once

#include <set>

#include "hubsim/types.hpp"

namespace hubsim {

constexpr int kMinTargetValue = 67;
constexpr int kMaxTargetValue = 100;
// A target shows its value once this many entity assessments have been made.
constexpr int kEvaluationsToValue = 2;

struct Target {
  TargetId id{};
  Vec2 position{};
  int value{kMinTargetValue};
  std::set<CollectiveId> discovered_by;
  int evaluations{0};
  bool occupied{false};

  bool discovered() const { return !discovered_by.empty(); }
  bool valued() const { return evaluations >= kEvaluationsToValue; }
};

// Euclidean distance from hub to target no greater than the 500 m search range.
bool in_range(Vec2 hub, const Target& target);
bool in_range(Vec2 hub, Vec2 point);

}  // namespace hubsim
