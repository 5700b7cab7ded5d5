#include "hubsim/probe.hpp"

#include <array>

namespace hubsim {
namespace {

struct TemplateInfo {
  ProbeTemplate templ;
  std::string_view name;
  SALevel level;
  bool needs_collective;
  bool needs_target;
};

constexpr std::array<TemplateInfo, kProbeTemplateCount> kTemplates{{
    {ProbeTemplate::InvestigatingCollectives, "InvestigatingCollectives", SALevel::SA1, false, true},
    {ProbeTemplate::TargetsInRange, "TargetsInRange", SALevel::SA1, true, false},
    {ProbeTemplate::TargetValue, "TargetValue", SALevel::SA1, false, true},
    {ProbeTemplate::DiscoveredCount, "DiscoveredCount", SALevel::SA1, true, false},
    {ProbeTemplate::AbandoningCollectives, "AbandoningCollectives", SALevel::SA1, false, true},
    {ProbeTemplate::MajoritySupport, "MajoritySupport", SALevel::SA2, false, true},
    {ProbeTemplate::MostFavoredTarget, "MostFavoredTarget", SALevel::SA2, true, false},
    {ProbeTemplate::IsCommitted, "IsCommitted", SALevel::SA2, true, false},
    {ProbeTemplate::StrongestSupporter, "StrongestSupporter", SALevel::SA2, false, true},
    {ProbeTemplate::SupportWillDecrease, "SupportWillDecrease", SALevel::SA3, false, true},
    {ProbeTemplate::SupportWillIncrease, "SupportWillIncrease", SALevel::SA3, false, true},
    {ProbeTemplate::WillMoveTo, "WillMoveTo", SALevel::SA3, true, true},
}};

const TemplateInfo& info(ProbeTemplate t) { return kTemplates[static_cast<std::size_t>(t)]; }

}  // namespace

std::string_view to_string(SALevel l) {
  switch (l) {
    case SALevel::SA1: return "SA1";
    case SALevel::SA2: return "SA2";
    case SALevel::SA3: return "SA3";
  }
  return "?";
}

SALevel level_of(ProbeTemplate t) { return info(t).level; }
std::string_view to_string(ProbeTemplate t) { return info(t).name; }
bool template_needs_target(ProbeTemplate t) { return info(t).needs_target; }
bool template_needs_collective(ProbeTemplate t) { return info(t).needs_collective; }

ProbeTemplate parse_probe_template(std::string_view s) {
  for (const auto& i : kTemplates)
    if (i.name == s) return i.templ;
  throw DomainError("unknown probe template: " + std::string(s));
}

std::string question_text(ProbeTemplate t, std::optional<CollectiveId> c, std::optional<TargetId> target) {
  const std::string col = c ? "Collective " + roman_label(*c) : "Collective ?";
  const std::string tgt = target ? "Target " + std::to_string(to_int(*target)) : "Target ?";
  switch (t) {
    case ProbeTemplate::InvestigatingCollectives: return "What collectives are investigating " + tgt + "?";
    case ProbeTemplate::TargetsInRange: return "Which targets are in range of " + col + "?";
    case ProbeTemplate::TargetValue: return "What is the value of " + tgt + "?";
    case ProbeTemplate::DiscoveredCount: return "How many targets has " + col + " discovered?";
    case ProbeTemplate::AbandoningCollectives: return "Which collectives have abandoned " + tgt + "?";
    case ProbeTemplate::MajoritySupport: return "Which Collective has achieved a majority support for " + tgt + "?";
    case ProbeTemplate::MostFavoredTarget: return "Which target does " + col + " favor most?";
    case ProbeTemplate::IsCommitted: return "Is " + col + " committed to a target?";
    case ProbeTemplate::StrongestSupporter: return "Which collective has the highest support for " + tgt + "?";
    case ProbeTemplate::SupportWillDecrease: return "Will support for " + tgt + " decrease?";
    case ProbeTemplate::SupportWillIncrease: return "Will support for " + tgt + " increase?";
    case ProbeTemplate::WillMoveTo: return "Will " + col + " move to " + tgt + "?";
  }
  return "?";
}

std::string to_string(const Answer& a) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "none"; }
    std::string operator()(bool b) const { return b ? "yes" : "no"; }
    std::string operator()(int v) const { return std::to_string(v); }
    std::string operator()(const std::vector<int>& ids) const {
      std::string s = "{";
      for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
      return s + "}";
    }
  };
  return std::visit(Visitor{}, a);
}

std::string_view to_string(InteractionKind k) {
  switch (k) {
    case InteractionKind::CollectiveLeftClick: return "CollectiveLeftClick";
    case InteractionKind::CollectiveRightClick: return "CollectiveRightClick";
    case InteractionKind::TargetLeftClick: return "TargetLeftClick";
    case InteractionKind::TargetRightClick: return "TargetRightClick";
    case InteractionKind::WindowOpen: return "WindowOpen";
    case InteractionKind::WindowClose: return "WindowClose";
    case InteractionKind::WindowDrag: return "WindowDrag";
    case InteractionKind::CommandIssued: return "CommandIssued";
    case InteractionKind::Layout: return "Layout";
  }
  return "?";
}

InteractionKind parse_interaction_kind(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(InteractionKind::Layout); ++i) {
    const auto k = static_cast<InteractionKind>(i);
    if (to_string(k) == s) return k;
  }
  throw DomainError("unknown interaction kind: " + std::string(s));
}

}  // namespace hubsim
