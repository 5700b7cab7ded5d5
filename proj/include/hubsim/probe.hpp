#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hubsim/types.hpp"

namespace hubsim {

enum class SALevel { SA1, SA2, SA3 };

std::string_view to_string(SALevel l);

// Twelve question templates: five perception, four comprehension, three projection.
enum class ProbeTemplate {
  InvestigatingCollectives,  // SA1 "What collectives are investigating Target t?"
  TargetsInRange,            // SA1 "Which targets are in range of Collective c?"
  TargetValue,               // SA1 "What is the value of Target t?"
  DiscoveredCount,           // SA1 "How many targets has Collective c discovered?"
  AbandoningCollectives,     // SA1 "Which collectives have abandoned Target t?"
  MajoritySupport,           // SA2 "Which Collective has achieved a majority support for Target t?"
  MostFavoredTarget,         // SA2 "Which target does Collective c favor most?"
  IsCommitted,               // SA2 "Is Collective c committed to a target?"
  StrongestSupporter,        // SA2 "Which collective has the highest support for Target t?"
  SupportWillDecrease,       // SA3 "Will support for Target t decrease?"
  SupportWillIncrease,       // SA3 "Will support for Target t increase?"
  WillMoveTo,                // SA3 "Will Collective c move to Target t?"
};

constexpr int kProbeTemplateCount = 12;

SALevel level_of(ProbeTemplate t);
std::string_view to_string(ProbeTemplate t);
ProbeTemplate parse_probe_template(std::string_view s);
bool template_needs_target(ProbeTemplate t);
bool template_needs_collective(ProbeTemplate t);
std::string question_text(ProbeTemplate t, std::optional<CollectiveId> c, std::optional<TargetId> target);

// Probe answers are one of: nothing, yes/no, a number or id, or a set of ids.
using Answer = std::variant<std::monostate, bool, int, std::vector<int>>;

std::string to_string(const Answer& a);

struct SAProbe {
  int index{0};
  double ask_time{0.0};
  SALevel level{SALevel::SA1};
  ProbeTemplate templ{ProbeTemplate::InvestigatingCollectives};
  std::optional<CollectiveId> subject_collective;
  std::optional<TargetId> subject_target;
  Vec2 subject_position{};  // world meters at ask time
  Answer ground_truth;
  std::optional<Answer> response;
  std::optional<double> response_time;

  bool correct() const { return response && *response == ground_truth; }
};

enum class InteractionKind {
  CollectiveLeftClick,
  CollectiveRightClick,
  TargetLeftClick,
  TargetRightClick,
  WindowOpen,
  WindowClose,
  WindowDrag,
  CommandIssued,
  Layout,
};

std::string_view to_string(InteractionKind k);
InteractionKind parse_interaction_kind(std::string_view s);

enum class WindowKind { Target, Collective };

// Console-reported counts feeding the clutter computation.
struct LayoutCounts {
  int highlighted_targets{0};
  int plain_targets{0};
  int target_windows{0};
  int collective_windows{0};
  VisualizationMode mode{VisualizationMode::Collective};

  friend bool operator==(const LayoutCounts&, const LayoutCounts&) = default;
};

struct InteractionEvent {
  double timestamp{0.0};
  InteractionKind kind{InteractionKind::TargetLeftClick};
  int subject{-1};  // target id, collective id, or -1
  WindowKind window{WindowKind::Target};
  Vec2 screen_position{};
  std::optional<LayoutCounts> layout;  // Layout events only

  friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

}  // namespace hubsim
