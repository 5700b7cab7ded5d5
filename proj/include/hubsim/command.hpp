#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hubsim/types.hpp"

namespace hubsim {

enum class CommandKind { Investigate, Abandon, Decide, CancelAbandon };

std::string_view to_string(CommandKind k);
CommandKind parse_command_kind(std::string_view s);

struct OperatorCommand {
  CommandKind kind{CommandKind::Investigate};
  CollectiveId collective{};
  std::optional<TargetId> target;      // absent for CancelAbandon
  std::optional<int> assignment_id;    // CancelAbandon only
  double issued_at{0.0};

  friend bool operator==(const OperatorCommand&, const OperatorCommand&) = default;
};

enum class IllegalCause { OutOfRange, UnvaluedTarget, InsufficientSupport, DecideLocked, Other };

std::string_view to_string(IllegalCause c);
IllegalCause parse_illegal_cause(std::string_view s);

// Outcome of validation: accepted, or illegal with cause and operator-facing text.
struct Verdict {
  bool accepted{true};
  IllegalCause cause{IllegalCause::Other};
  std::string text;

  static Verdict accept() { return {}; }
  static Verdict illegal(IllegalCause c, std::string text) { return {false, c, std::move(text)}; }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

enum class AssignmentStatus { Active, Completed, Cancelled };

std::string_view to_string(AssignmentStatus s);
AssignmentStatus parse_assignment_status(std::string_view s);

struct Assignment {
  int id{0};
  OperatorCommand command;
  AssignmentStatus status{AssignmentStatus::Active};

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

enum class Severity { Info, Illegal };

struct SystemMessage {
  double timestamp{0.0};
  Severity severity{Severity::Info};
  std::string text;
  IllegalCause cause{IllegalCause::Other};

  friend bool operator==(const SystemMessage&, const SystemMessage&) = default;
};

}  // namespace hubsim
