#include "hubsim/state.hpp"

namespace hubsim {
namespace {

// "Name(7)" -> {"Name", 7}; "Name" -> {"Name", nullopt}
std::pair<std::string, std::optional<int>> split_tagged(const std::string& s) {
  const auto open = s.find('(');
  if (open == std::string::npos) return {s, std::nullopt};
  if (s.back() != ')') throw DomainError("malformed state: " + s);
  return {s.substr(0, open), std::stoi(s.substr(open + 1, s.size() - open - 2))};
}

}  // namespace

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Uncommitted: return "Uncommitted";
    case Decision::Favoring: return "Favoring";
    case Decision::Committed: return "Committed";
    case Decision::Executing: return "Executing";
  }
  return "?";
}

std::string to_string(const EntityState& s) {
  if (!s.target()) return to_string(s.decision());
  return to_string(s.decision()) + "(" + std::to_string(to_int(*s.target())) + ")";
}

EntityState parse_entity_state(const std::string& s) {
  const auto [name, tag] = split_tagged(s);
  if (name == "Uncommitted" && !tag) return EntityState::uncommitted();
  if (!tag) throw DomainError("state requires a target: " + s);
  const TargetId t = target_id(*tag);
  if (name == "Favoring") return EntityState::favoring(t);
  if (name == "Committed") return EntityState::committed(t);
  if (name == "Executing") return EntityState::executing(t);
  throw DomainError("unknown entity state: " + s);
}

std::string_view to_string(Errand e) {
  switch (e) {
    case Errand::InHub: return "InHub";
    case Errand::Exploring: return "Exploring";
    case Errand::TravelingToTarget: return "TravelingToTarget";
    case Errand::AssessingTarget: return "AssessingTarget";
    case Errand::Returning: return "Returning";
    case Errand::Lost: return "Lost";
  }
  return "?";
}

std::string to_string(const Phase& p) {
  switch (p.kind) {
    case PhaseKind::Deliberating: return "Deliberating";
    case PhaseKind::Committed: return "Committed(" + std::to_string(to_int(p.target)) + ")";
    case PhaseKind::Executing: return "Executing(" + std::to_string(to_int(p.target)) + ")";
    case PhaseKind::Decided: return "Decided(" + std::to_string(to_int(p.target)) + ")";
  }
  return "?";
}

Phase parse_phase(const std::string& s) {
  const auto [name, tag] = split_tagged(s);
  if (name == "Deliberating" && !tag) return Phase::deliberating();
  if (!tag) throw DomainError("phase requires a target: " + s);
  const TargetId t = target_id(*tag);
  if (name == "Committed") return Phase::committed(t);
  if (name == "Executing") return Phase::executing(t);
  if (name == "Decided") return Phase::decided(t);
  throw DomainError("unknown phase: " + s);
}

}  // namespace hubsim
