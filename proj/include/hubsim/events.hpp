#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hubsim/command.hpp"
#include "hubsim/probe.hpp"
#include "hubsim/state.hpp"
#include "hubsim/target.hpp"

namespace hubsim {

enum class TransitionCause {
  Discovery,
  Recruit,
  CommitContact,
  Quorum,
  Investigate,
  Abandon,
  Decide,
  TargetLost,
  Reassess,
  Reset,
};

std::string_view to_string(TransitionCause c);

struct EntityTransition {
  CollectiveId collective{};
  int entity{0};
  EntityState from;
  EntityState to;
  TransitionCause cause{TransitionCause::Recruit};
};

struct EntityLost {
  CollectiveId collective{};
  int entity{0};
};

struct Discovery {
  CollectiveId collective{};
  TargetId target{};
  int entity{0};
};

// Emitted when a target gathers enough assessments to show its value.
struct TargetValued {
  TargetId target{};
  int value{0};
};

struct PhaseChange {
  CollectiveId collective{};
  Phase from;
  Phase to;
};

struct CommandResult {
  OperatorCommand command;
  Verdict verdict;
  std::optional<int> assignment_id;
  // Context at application time, consumed by interaction metrics.
  int support{0};
  int live_population{0};
  bool highest_value_target{false};
  int decision_index{0};
};

struct ProbeAsked {
  SAProbe probe;
};

struct ProbeAnswered {
  int index{0};
  Answer response;
  double response_time{0.0};
  bool correct{false};
};

enum class MoveOutcomeKind { Established, Returned };

struct HubMove {
  CollectiveId collective{};
  MoveOutcomeKind outcome{MoveOutcomeKind::Established};
  TargetId target{};
  Vec2 from{};
  Vec2 to{};
};

struct DecisionRecord {
  CollectiveId collective{};
  int index{1};  // 1 or 2 within a component
  int component{0};
  double start{0.0};
  double end{0.0};
  TargetId selected_target{};
  int selected_value{0};
  int ground_truth_best_value{0};
  bool established{true};
  bool operator_decided{false};
  std::optional<double> commit_time;
  std::optional<double> decide_time;
  Difficulty difficulty{Difficulty::Easy};

  bool success() const { return established && selected_value == ground_truth_best_value; }
  double duration_minutes() const { return (end - start) / 60.0; }
};

struct ComponentStart {
  int index{0};
  Difficulty difficulty{Difficulty::Easy};
  std::vector<Vec2> hubs;
  std::vector<Target> targets;
};

enum class TrialEndReason { DecisionsComplete, DecisionCapAfterLimit, Timeout };

std::string_view to_string(TrialEndReason r);

struct ComponentEnd {
  int index{0};
  TrialEndReason reason{TrialEndReason::DecisionsComplete};
  int decisions{0};
};

struct TrialEnd {
  int decisions{0};
};

struct UIEvent {
  InteractionEvent event;
};

using EventPayload = std::variant<EntityTransition, EntityLost, Discovery, TargetValued, PhaseChange, CommandResult,
                                  ProbeAsked, ProbeAnswered, HubMove, DecisionRecord, ComponentStart, ComponentEnd,
                                  TrialEnd, UIEvent>;

struct SessionEvent {
  std::uint64_t seq{0};
  std::int64_t tick{0};
  EventPayload payload;

  double sim_time() const { return tick_to_seconds(tick); }
};

std::string_view payload_type(const EventPayload& p);

nlohmann::json to_json(const SessionEvent& e);
SessionEvent event_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OperatorCommand& c);
OperatorCommand command_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Answer& a);
Answer answer_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InteractionEvent& e);
InteractionEvent interaction_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SAProbe& p);
SAProbe probe_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Target& t);
Target target_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DecisionRecord& d);
DecisionRecord decision_from_json(const nlohmann::json& j);

}  // namespace hubsim
