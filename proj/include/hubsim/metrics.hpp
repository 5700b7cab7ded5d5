#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hubsim/events.hpp"
#include "hubsim/probe.hpp"
#include "hubsim/rng.hpp"

namespace hubsim {

// Pixel areas of the interface components, IA display dimensions.
struct ClutterConstants {
  std::int64_t screen_area{2'073'600};
  std::int64_t ica{493'414};       // static interface components
  std::int64_t gha{9'856};         // collective hubs I-IV
  std::int64_t ghta_per{2'350};    // per highlighted target
  std::int64_t gta_per{1'720};     // per plain target
  std::int64_t gaice{51'200};      // individual entities, IA mode only
  std::int64_t gtiw_per{32'922};   // per target information window
  std::int64_t gciw_per{25'740};   // per collective information window
  double px_per_meter{1.97};
};

// Percentage of the screen obstructed by interface objects.
double global_clutter(const LayoutCounts& counts, const ClutterConstants& k = {});

Vec2 world_to_screen(Vec2 world, const ClutterConstants& k = {});

// --- SA probes -------------------------------------------------------------

constexpr int kProbesPerComponent = 6;
constexpr double kFirstProbeOffset = 50.0;
constexpr double kProbeInterval = 60.0;
constexpr double kPreProbeWindow = 15.0;
constexpr double kProbePromptSeconds = 5.0;
constexpr double kTrendHorizon = 30.0;

std::vector<double> schedule_probes(double component_start);

// Twelve templates in a seeded order; component k asks entries [6k, 6k+6).
std::vector<ProbeTemplate> probe_template_plan(Rng& rng);

struct CollectiveView {
  CollectiveId id{};
  Vec2 hub{};
  Phase phase;
  std::map<TargetId, int> support;
  std::set<TargetId> abandoned;
  int live{0};
  bool idle{false};
};

struct TargetView {
  TargetId id{};
  Vec2 position{};
  int value{0};
  bool valued{false};
  bool occupied{false};
  std::set<CollectiveId> discovered_by;
};

// Immutable state read by the probe answer engine.
struct WorldSnapshot {
  double now{0.0};
  std::vector<CollectiveView> collectives;
  std::vector<TargetView> targets;
  // Total support per target sampled over the trailing trend horizon.
  std::map<TargetId, std::vector<std::pair<double, int>>> support_trend;

  const CollectiveView* collective(CollectiveId id) const;
  const TargetView* target(TargetId id) const;
};

class SubjectVanished : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Least-squares slope of (time, support) samples; 0 with fewer than two samples.
double trend_slope(const std::vector<std::pair<double, int>>& samples);

// Throws SubjectVanished when the subject target is occupied or missing.
Answer ground_truth_answer(const SAProbe& probe, const WorldSnapshot& snapshot);

struct SAScores {
  std::optional<double> overall;
  std::optional<double> sa1;
  std::optional<double> sa2;
  std::optional<double> sa3;
  int asked{0};
  int correct{0};
};

// Percent correct overall and per level; unanswered probes count incorrect.
SAScores score_sa(std::span<const SAProbe> probes);

// --- Interaction telemetry -----------------------------------------------

struct InteractionSummary {
  int collective_left_clicks{0};
  int collective_right_clicks{0};
  int target_left_clicks{0};
  int target_right_clicks{0};
  int collective_observations{0};
  int target_observations{0};
  int investigate_commands{0};
  int abandon_commands{0};
  int decide_commands{0};
  int illegal_commands{0};
  int interventions{0};
  int distinct_abandoned{0};
  int highest_value_abandoned{0};
  int windows_opened{0};

  std::optional<double> collective_observation_pct() const;
  std::optional<double> target_observation_pct() const;
  std::optional<double> highest_value_abandoned_pct() const;
  std::optional<double> abandon_exceeded_pct() const;
};

// Abandon with strictly more than 10% of the live collective supporting the target.
bool is_intervention(const CommandResult& abandon);

// Throws DomainError when either log is not time-ordered.
InteractionSummary classify_interactions(std::span<const InteractionEvent> events,
                                         std::span<const CommandResult> commands);

double probe_click_distance(Vec2 probe_subject_px, Vec2 click_px);

enum class ProbeTiming { Before, While, During };

std::string_view to_string(ProbeTiming t);

// Bucket of an instant relative to a probe: [ask-15, ask) before, [ask, ask+5)
// while asked, [ask+5, response] during response.
std::optional<ProbeTiming> classify_timing(double t, const SAProbe& probe);

struct ProbeDistances {
  std::optional<double> before;
  std::optional<double> during_asking;
  std::optional<double> during_response;
};

// Mean click distance to the probe subject in each timing bucket.
ProbeDistances probe_distances(const SAProbe& probe, Vec2 subject_px, std::span<const InteractionEvent> events);

// --- Clutter timelines ----------------------------------------------------

struct LayoutSample {
  double time{0.0};
  LayoutCounts counts;
};

// Time-weighted mean clutter over [from, to) given a piecewise-constant layout timeline.
double mean_clutter(std::span<const LayoutSample> timeline, double from, double to, const ClutterConstants& k = {});

struct ProbeClutter {
  int probe_index{0};
  SALevel level{SALevel::SA1};
  double before{0.0};
  double during_asking{0.0};
  double during_response{0.0};
};

std::vector<ProbeClutter> clutter_at_probes(std::span<const SAProbe> probes, std::span<const LayoutSample> timeline,
                                            const ClutterConstants& k = {});

double response_window_end(const SAProbe& probe);
bool unanswered_and_open(const SAProbe& probe, double now);

// --- Performance -----------------------------------------------------------

struct PerformanceMetrics {
  int decisions{0};
  std::optional<double> decision_time_minutes;
  std::optional<double> selection_success_pct;
  std::optional<double> mean_selected_value;
  std::optional<double> commit_to_decide_minutes;
  std::optional<double> target_window_open_pct;
  std::optional<double> target_window_frequency;
  SAScores sa;
};

struct WindowInterval {
  int target{0};
  double open{0.0};
  double close{0.0};
};

// Pairs WindowOpen/WindowClose per target window; windows still open close at `end`.
std::vector<WindowInterval> target_window_intervals(std::span<const InteractionEvent> events, double end);

PerformanceMetrics performance_rollup(std::span<const DecisionRecord> decisions, std::span<const SAProbe> probes,
                                      std::span<const InteractionEvent> events);

}  // namespace hubsim
