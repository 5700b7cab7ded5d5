#include "hubsim/command.hpp"

namespace hubsim {

std::string_view to_string(CommandKind k) {
  switch (k) {
    case CommandKind::Investigate: return "Investigate";
    case CommandKind::Abandon: return "Abandon";
    case CommandKind::Decide: return "Decide";
    case CommandKind::CancelAbandon: return "CancelAbandon";
  }
  return "?";
}

CommandKind parse_command_kind(std::string_view s) {
  if (s == "Investigate" || s == "investigate") return CommandKind::Investigate;
  if (s == "Abandon" || s == "abandon") return CommandKind::Abandon;
  if (s == "Decide" || s == "decide") return CommandKind::Decide;
  if (s == "CancelAbandon" || s == "cancel_abandon" || s == "cancel") return CommandKind::CancelAbandon;
  throw DomainError("unknown command kind: " + std::string(s));
}

std::string_view to_string(IllegalCause c) {
  switch (c) {
    case IllegalCause::OutOfRange: return "OutOfRange";
    case IllegalCause::UnvaluedTarget: return "UnvaluedTarget";
    case IllegalCause::InsufficientSupport: return "InsufficientSupport";
    case IllegalCause::DecideLocked: return "DecideLocked";
    case IllegalCause::Other: return "Other";
  }
  return "?";
}

IllegalCause parse_illegal_cause(std::string_view s) {
  for (auto c : {IllegalCause::OutOfRange, IllegalCause::UnvaluedTarget, IllegalCause::InsufficientSupport,
                 IllegalCause::DecideLocked, IllegalCause::Other})
    if (to_string(c) == s) return c;
  throw DomainError("unknown illegal cause: " + std::string(s));
}

std::string_view to_string(AssignmentStatus s) {
  switch (s) {
    case AssignmentStatus::Active: return "Active";
    case AssignmentStatus::Completed: return "Completed";
    case AssignmentStatus::Cancelled: return "Cancelled";
  }
  return "?";
}

AssignmentStatus parse_assignment_status(std::string_view s) {
  for (auto a : {AssignmentStatus::Active, AssignmentStatus::Completed, AssignmentStatus::Cancelled})
    if (to_string(a) == s) return a;
  throw DomainError("unknown assignment status: " + std::string(s));
}

}  // namespace hubsim
