#include "hubsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hubsim {
namespace {

constexpr std::array<ProbeTemplate, kProbeTemplateCount> kAllTemplates{
    ProbeTemplate::InvestigatingCollectives, ProbeTemplate::TargetsInRange,    ProbeTemplate::TargetValue,
    ProbeTemplate::DiscoveredCount,          ProbeTemplate::AbandoningCollectives, ProbeTemplate::MajoritySupport,
    ProbeTemplate::MostFavoredTarget,        ProbeTemplate::IsCommitted,       ProbeTemplate::StrongestSupporter,
    ProbeTemplate::SupportWillDecrease,      ProbeTemplate::SupportWillIncrease, ProbeTemplate::WillMoveTo,
};

int support_of(const CollectiveView& c, TargetId t) {
  const auto it = c.support.find(t);
  return it == c.support.end() ? 0 : it->second;
}

std::vector<int> sorted_ids(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

const TargetView& require_target(const WorldSnapshot& s, const SAProbe& p) {
  if (!p.subject_target) throw SubjectVanished("probe has no subject target");
  const TargetView* t = s.target(*p.subject_target);
  if (t == nullptr || t->occupied)
    throw SubjectVanished("target " + std::to_string(to_int(*p.subject_target)) + " no longer available");
  return *t;
}

const CollectiveView& require_collective(const WorldSnapshot& s, const SAProbe& p) {
  if (!p.subject_collective) throw SubjectVanished("probe has no subject collective");
  const CollectiveView* c = s.collective(*p.subject_collective);
  if (c == nullptr) throw SubjectVanished("unknown collective");
  return *c;
}

double trend_for(const WorldSnapshot& s, TargetId t) {
  const auto it = s.support_trend.find(t);
  return it == s.support_trend.end() ? 0.0 : trend_slope(it->second);
}

bool abandoned_anywhere(const WorldSnapshot& s, TargetId t) {
  return std::any_of(s.collectives.begin(), s.collectives.end(),
                     [t](const CollectiveView& c) { return c.abandoned.contains(t); });
}

// Some collective backing t has a different target with strictly more support.
bool competitor_dominates(const WorldSnapshot& s, TargetId t) {
  for (const auto& c : s.collectives) {
    const int mine = support_of(c, t);
    if (mine == 0) continue;
    for (const auto& [other, n] : c.support)
      if (other != t && n > mine) return true;
  }
  return false;
}

std::optional<double> percent(int num, int den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

template <typename T, typename Key>
void require_ordered(std::span<const T> items, Key key, const char* what) {
  for (std::size_t i = 1; i < items.size(); ++i)
    if (key(items[i]) < key(items[i - 1])) throw DomainError(std::string(what) + " log is not time-ordered");
}

}  // namespace

double global_clutter(const LayoutCounts& n, const ClutterConstants& k) {
  const std::int64_t area = k.ica + k.gha + n.highlighted_targets * k.ghta_per + n.plain_targets * k.gta_per +
                            (n.mode == VisualizationMode::IA ? k.gaice : 0) + n.target_windows * k.gtiw_per +
                            n.collective_windows * k.gciw_per;
  return static_cast<double>(area) / static_cast<double>(k.screen_area) * 100.0;
}

Vec2 world_to_screen(Vec2 world, const ClutterConstants& k) { return world * k.px_per_meter; }

std::vector<double> schedule_probes(double component_start) {
  std::vector<double> times;
  times.reserve(kProbesPerComponent);
  for (int k = 0; k < kProbesPerComponent; ++k) times.push_back(component_start + kFirstProbeOffset + kProbeInterval * k);
  return times;
}

std::vector<ProbeTemplate> probe_template_plan(Rng& rng) {
  std::vector<ProbeTemplate> plan(kAllTemplates.begin(), kAllTemplates.end());
  std::shuffle(plan.begin(), plan.end(), rng);
  return plan;
}

const CollectiveView* WorldSnapshot::collective(CollectiveId id) const {
  for (const auto& c : collectives)
    if (c.id == id) return &c;
  return nullptr;
}

const TargetView* WorldSnapshot::target(TargetId id) const {
  for (const auto& t : targets)
    if (t.id == id) return &t;
  return nullptr;
}

double trend_slope(const std::vector<std::pair<double, int>>& samples) {
  if (samples.size() < 2) return 0.0;
  const double n = static_cast<double>(samples.size());
  double mt = 0.0, mv = 0.0;
  for (const auto& [t, v] : samples) {
    mt += t;
    mv += v;
  }
  mt /= n;
  mv /= n;
  double num = 0.0, den = 0.0;
  for (const auto& [t, v] : samples) {
    num += (t - mt) * (v - mv);
    den += (t - mt) * (t - mt);
  }
  return den == 0.0 ? 0.0 : num / den;
}

Answer ground_truth_answer(const SAProbe& p, const WorldSnapshot& s) {
  switch (p.templ) {
    case ProbeTemplate::InvestigatingCollectives: {
      const auto& t = require_target(s, p);
      std::vector<int> ids;
      for (const auto& c : s.collectives)
        if (support_of(c, t.id) > 0) ids.push_back(to_int(c.id));
      return sorted_ids(ids);
    }
    case ProbeTemplate::TargetsInRange: {
      const auto& c = require_collective(s, p);
      std::vector<int> ids;
      for (const auto& t : s.targets)
        if (!t.occupied && !t.discovered_by.empty() && in_range(c.hub, t.position)) ids.push_back(to_int(t.id));
      return sorted_ids(ids);
    }
    case ProbeTemplate::TargetValue: {
      const auto& t = require_target(s, p);
      if (!t.valued) return std::monostate{};
      return t.value;
    }
    case ProbeTemplate::DiscoveredCount: {
      const auto& c = require_collective(s, p);
      return static_cast<int>(std::count_if(s.targets.begin(), s.targets.end(), [&](const TargetView& t) {
        return !t.occupied && t.discovered_by.contains(c.id);
      }));
    }
    case ProbeTemplate::AbandoningCollectives: {
      const auto& t = require_target(s, p);
      std::vector<int> ids;
      for (const auto& c : s.collectives)
        if (c.abandoned.contains(t.id)) ids.push_back(to_int(c.id));
      return sorted_ids(ids);
    }
    case ProbeTemplate::MajoritySupport: {
      const auto& t = require_target(s, p);
      std::vector<int> ids;
      for (const auto& c : s.collectives) {
        int advocating = 0;
        for (const auto& [_, n] : c.support) advocating += n;
        if (2 * support_of(c, t.id) > advocating) ids.push_back(to_int(c.id));
      }
      return sorted_ids(ids);
    }
    case ProbeTemplate::MostFavoredTarget: {
      const auto& c = require_collective(s, p);
      int best = 0;
      std::optional<TargetId> leader;
      for (const auto& [t, n] : c.support) {
        if (n > best) {
          best = n;
          leader = t;
        }
      }
      if (!leader) return std::monostate{};
      return to_int(*leader);
    }
    case ProbeTemplate::IsCommitted: {
      const auto& c = require_collective(s, p);
      return c.phase.kind == PhaseKind::Committed || c.phase.kind == PhaseKind::Executing;
    }
    case ProbeTemplate::StrongestSupporter: {
      const auto& t = require_target(s, p);
      int best = 0;
      std::optional<CollectiveId> leader;
      for (const auto& c : s.collectives) {
        const int n = support_of(c, t.id);
        if (n > best) {
          best = n;
          leader = c.id;
        }
      }
      if (!leader) return std::monostate{};
      return to_int(*leader);
    }
    case ProbeTemplate::SupportWillDecrease: {
      const auto& t = require_target(s, p);
      if (abandoned_anywhere(s, t.id)) return true;
      return competitor_dominates(s, t.id) && trend_for(s, t.id) < 0.0;
    }
    case ProbeTemplate::SupportWillIncrease: {
      const auto& t = require_target(s, p);
      if (abandoned_anywhere(s, t.id)) return false;
      return !competitor_dominates(s, t.id) && trend_for(s, t.id) > 0.0;
    }
    case ProbeTemplate::WillMoveTo: {
      const auto& c = require_collective(s, p);
      const auto& t = require_target(s, p);
      return (c.phase.kind == PhaseKind::Committed || c.phase.kind == PhaseKind::Executing) && c.phase.target == t.id;
    }
  }
  return std::monostate{};
}

SAScores score_sa(std::span<const SAProbe> probes) {
  std::array<int, 3> asked{};
  std::array<int, 3> right{};
  for (const auto& p : probes) {
    const auto level = static_cast<std::size_t>(p.level);
    ++asked[level];
    if (p.correct()) ++right[level];
  }
  SAScores s;
  s.asked = asked[0] + asked[1] + asked[2];
  s.correct = right[0] + right[1] + right[2];
  s.overall = percent(s.correct, s.asked);
  s.sa1 = percent(right[0], asked[0]);
  s.sa2 = percent(right[1], asked[1]);
  s.sa3 = percent(right[2], asked[2]);
  return s;
}

std::optional<double> InteractionSummary::collective_observation_pct() const {
  return percent(collective_observations, collective_left_clicks);
}

std::optional<double> InteractionSummary::target_observation_pct() const {
  return percent(target_observations, target_left_clicks);
}

std::optional<double> InteractionSummary::highest_value_abandoned_pct() const {
  return percent(highest_value_abandoned, abandon_commands);
}

std::optional<double> InteractionSummary::abandon_exceeded_pct() const {
  return percent(abandon_commands - distinct_abandoned, abandon_commands);
}

bool is_intervention(const CommandResult& r) {
  return r.command.kind == CommandKind::Abandon && 10 * r.support > r.live_population;
}

InteractionSummary classify_interactions(std::span<const InteractionEvent> events,
                                         std::span<const CommandResult> commands) {
  require_ordered(events, [](const InteractionEvent& e) { return e.timestamp; }, "interaction");
  require_ordered(commands, [](const CommandResult& c) { return c.command.issued_at; }, "command");

  InteractionSummary s;
  std::vector<bool> consumed(events.size(), false);
  double previous_command = -1.0;
  std::set<std::tuple<int, int, int>> abandoned_keys;

  for (const auto& r : commands) {
    if (!r.verdict.accepted) {
      ++s.illegal_commands;
      continue;
    }
    const double at = r.command.issued_at;
    // The selection clicks that set up this command: the latest click on its
    // collective and on its target since the previous accepted command.
    const auto consume_latest = [&](InteractionKind kind, int subject) {
      for (std::size_t i = events.size(); i-- > 0;) {
        const auto& e = events[i];
        if (e.timestamp > at || consumed[i]) continue;
        if (e.timestamp <= previous_command) break;
        if (e.kind == kind && e.subject == subject) {
          consumed[i] = true;
          return;
        }
      }
    };
    consume_latest(InteractionKind::CollectiveLeftClick, to_int(r.command.collective));
    if (r.command.target) consume_latest(InteractionKind::TargetLeftClick, to_int(*r.command.target));
    previous_command = at;

    switch (r.command.kind) {
      case CommandKind::Investigate: ++s.investigate_commands; break;
      case CommandKind::Decide: ++s.decide_commands; break;
      case CommandKind::Abandon:
        ++s.abandon_commands;
        if (is_intervention(r)) ++s.interventions;
        if (r.highest_value_target) ++s.highest_value_abandoned;
        abandoned_keys.insert({to_int(r.command.collective), to_int(*r.command.target), r.decision_index});
        break;
      case CommandKind::CancelAbandon: break;
    }
  }
  s.distinct_abandoned = static_cast<int>(abandoned_keys.size());

  for (std::size_t i = 0; i < events.size(); ++i) {
    switch (events[i].kind) {
      case InteractionKind::CollectiveLeftClick:
        ++s.collective_left_clicks;
        if (!consumed[i]) ++s.collective_observations;
        break;
      case InteractionKind::TargetLeftClick:
        ++s.target_left_clicks;
        if (!consumed[i]) ++s.target_observations;
        break;
      case InteractionKind::CollectiveRightClick: ++s.collective_right_clicks; break;
      case InteractionKind::TargetRightClick: ++s.target_right_clicks; break;
      case InteractionKind::WindowOpen: ++s.windows_opened; break;
      default: break;
    }
  }
  return s;
}

double probe_click_distance(Vec2 a, Vec2 b) { return distance(a, b); }

std::string_view to_string(ProbeTiming t) {
  switch (t) {
    case ProbeTiming::Before: return "before";
    case ProbeTiming::While: return "while";
    case ProbeTiming::During: return "during";
  }
  return "?";
}

bool unanswered_and_open(const SAProbe& p, double now) { return !p.response && now <= response_window_end(p); }

double response_window_end(const SAProbe& p) {
  return p.response_time ? *p.response_time : p.ask_time + kProbeInterval - kPreProbeWindow;
}

std::optional<ProbeTiming> classify_timing(double t, const SAProbe& p) {
  if (t >= p.ask_time - kPreProbeWindow && t < p.ask_time) return ProbeTiming::Before;
  if (t >= p.ask_time && t < p.ask_time + kProbePromptSeconds) return ProbeTiming::While;
  if (t >= p.ask_time + kProbePromptSeconds && t <= response_window_end(p)) return ProbeTiming::During;
  return std::nullopt;
}

ProbeDistances probe_distances(const SAProbe& probe, Vec2 subject_px, std::span<const InteractionEvent> events) {
  std::array<double, 3> sum{};
  std::array<int, 3> n{};
  for (const auto& e : events) {
    const bool click = e.kind == InteractionKind::CollectiveLeftClick || e.kind == InteractionKind::CollectiveRightClick ||
                       e.kind == InteractionKind::TargetLeftClick || e.kind == InteractionKind::TargetRightClick;
    if (!click) continue;
    const auto timing = classify_timing(e.timestamp, probe);
    if (!timing) continue;
    const auto i = static_cast<std::size_t>(*timing);
    sum[i] += probe_click_distance(subject_px, e.screen_position);
    ++n[i];
  }
  const auto mean = [&](std::size_t i) -> std::optional<double> {
    if (n[i] == 0) return std::nullopt;
    return sum[i] / n[i];
  };
  return {mean(0), mean(1), mean(2)};
}

double mean_clutter(std::span<const LayoutSample> timeline, double from, double to, const ClutterConstants& k) {
  if (timeline.empty()) return global_clutter(LayoutCounts{}, k);
  if (!(to > from)) {
    // Degenerate window: value in force at `from`.
    const LayoutSample* current = &timeline.front();
    for (const auto& s : timeline)
      if (s.time <= from) current = &s;
    return global_clutter(current->counts, k);
  }
  double weighted = 0.0;
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    // The first sample also covers any time before it.
    const double start = i == 0 ? from : std::max(from, timeline[i].time);
    const double end = i + 1 < timeline.size() ? std::min(to, timeline[i + 1].time) : to;
    if (end > start) weighted += global_clutter(timeline[i].counts, k) * (end - start);
  }
  return weighted / (to - from);
}

std::vector<ProbeClutter> clutter_at_probes(std::span<const SAProbe> probes, std::span<const LayoutSample> timeline,
                                            const ClutterConstants& k) {
  std::vector<ProbeClutter> out;
  for (const auto& p : probes) {
    ProbeClutter c;
    c.probe_index = p.index;
    c.level = p.level;
    c.before = mean_clutter(timeline, p.ask_time - kPreProbeWindow, p.ask_time, k);
    c.during_asking = mean_clutter(timeline, p.ask_time, p.ask_time + kProbePromptSeconds, k);
    c.during_response = mean_clutter(timeline, p.ask_time + kProbePromptSeconds, response_window_end(p), k);
    out.push_back(c);
  }
  return out;
}

std::vector<WindowInterval> target_window_intervals(std::span<const InteractionEvent> events, double end) {
  std::map<int, double> open;
  std::vector<WindowInterval> out;
  for (const auto& e : events) {
    if (e.window != WindowKind::Target) continue;
    if (e.kind == InteractionKind::WindowOpen) {
      open.try_emplace(e.subject, e.timestamp);
    } else if (e.kind == InteractionKind::WindowClose) {
      const auto it = open.find(e.subject);
      if (it == open.end()) continue;
      out.push_back({e.subject, it->second, e.timestamp});
      open.erase(it);
    }
  }
  for (const auto& [subject, at] : open) out.push_back({subject, at, std::max(at, end)});
  std::sort(out.begin(), out.end(), [](const WindowInterval& a, const WindowInterval& b) {
    return std::tie(a.open, a.target) < std::tie(b.open, b.target);
  });
  return out;
}

PerformanceMetrics performance_rollup(std::span<const DecisionRecord> decisions, std::span<const SAProbe> probes,
                                      std::span<const InteractionEvent> events) {
  PerformanceMetrics m;
  m.decisions = static_cast<int>(decisions.size());
  m.sa = score_sa(probes);
  if (decisions.empty()) return m;

  double minutes = 0.0, value = 0.0;
  int success = 0;
  double latency = 0.0;
  int latency_n = 0;
  for (const auto& d : decisions) {
    minutes += d.duration_minutes();
    value += d.selected_value;
    if (d.success()) ++success;
    if (d.commit_time && d.decide_time) {
      latency += (*d.decide_time - *d.commit_time) / 60.0;
      ++latency_n;
    }
  }
  const double n = static_cast<double>(decisions.size());
  m.decision_time_minutes = minutes / n;
  m.mean_selected_value = value / n;
  m.selection_success_pct = percent(success, static_cast<int>(decisions.size()));
  if (latency_n > 0) m.commit_to_decide_minutes = latency / latency_n;

  double last_end = 0.0;
  for (const auto& d : decisions) last_end = std::max(last_end, d.end);
  const auto windows = target_window_intervals(events, last_end);
  if (!windows.empty()) {
    double open_pct_sum = 0.0, freq_sum = 0.0;
    int per_decision = 0;
    for (const auto& d : decisions) {
      const double span = d.end - d.start;
      if (span <= 0.0) continue;
      std::map<int, double> open_time;
      std::map<int, int> opens;
      for (const auto& w : windows) {
        const double overlap = std::min(w.close, d.end) - std::max(w.open, d.start);
        if (overlap <= 0.0 && !(w.open >= d.start && w.open < d.end)) continue;
        open_time[w.target] += std::max(0.0, overlap);
        if (w.open >= d.start && w.open < d.end) ++opens[w.target];
      }
      if (open_time.empty()) continue;
      double pct = 0.0, freq = 0.0;
      for (const auto& [t, secs] : open_time) {
        pct += 100.0 * secs / span;
        freq += opens[t];
      }
      open_pct_sum += pct / static_cast<double>(open_time.size());
      freq_sum += freq / static_cast<double>(open_time.size());
      ++per_decision;
    }
    if (per_decision > 0) {
      m.target_window_open_pct = open_pct_sum / per_decision;
      m.target_window_frequency = freq_sum / per_decision;
    }
  }
  return m;
}

}  // namespace hubsim
