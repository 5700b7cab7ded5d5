#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hubsim/collective.hpp"
#include "hubsim/events.hpp"
#include "hubsim/metrics.hpp"
#include "hubsim/protocol.hpp"
#include "hubsim/rng.hpp"
#include "hubsim/scenario.hpp"
#include "hubsim/world.hpp"

namespace hubsim {

struct ProbeAnswerInput {
  int index{0};
  Answer response;
};

// External inputs are queued and applied at the start of the next tick, in arrival order.
using EngineInput = std::variant<OperatorCommand, ProbeAnswerInput, InteractionEvent>;

class Engine {
 public:
  explicit Engine(Scenario scenario);

  void submit(EngineInput input);

  // Advances one 0.1 s tick and returns the events it produced.
  std::vector<SessionEvent> step();
  // Steps until the trial ends or `max_ticks` elapse; returns ticks run.
  std::int64_t run(std::int64_t max_ticks = INT64_MAX);

  bool finished() const { return finished_; }
  std::int64_t tick() const { return tick_; }
  double now() const { return tick_to_seconds(tick_); }
  int component() const { return component_; }
  Difficulty difficulty() const;
  double component_start() const { return progress_.component_start; }
  std::uint64_t last_seq() const { return next_seq_ - 1; }

  const Scenario& scenario() const { return scenario_; }
  const std::vector<Collective>& collectives() const { return collectives_; }
  const std::vector<Target>& targets() const { return targets_; }
  const OperatorDesk& desk() const { return desk_; }
  const std::vector<SAProbe>& probes() const { return probes_; }
  const std::vector<SessionEvent>& events() const { return log_; }
  const TrialProgress& progress() const { return progress_; }

  // Probe-engine view of the current state.
  WorldSnapshot world_view() const;
  // Operator-facing snapshot. Only discovered targets appear and no ground truth is included.
  nlohmann::json snapshot_json(bool include_entities) const;

 private:
  void start_component(int index);
  void end_component(TrialEndReason reason);
  void apply_inputs(std::vector<EventPayload>& out);
  void resolve_arrivals(std::vector<EventPayload>& out);
  void check_component_end();
  void ask_due_probes(std::vector<EventPayload>& out);
  void sample_support();
  std::optional<SAProbe> build_probe(ProbeTemplate templ, double ask_time);
  void flush(std::vector<EventPayload>& out, std::vector<SessionEvent>& sink);

  Scenario scenario_;
  Rng world_rng_;
  std::vector<Rng> collective_rngs_;

  std::int64_t tick_{0};
  std::uint64_t next_seq_{1};
  bool finished_{false};
  int component_{-1};
  std::vector<Collective> collectives_;
  std::vector<Target> targets_;
  TrialProgress progress_;
  std::optional<TrialEndReason> pending_end_;
  int decisions_total_{0};

  OperatorDesk desk_;
  std::deque<EngineInput> inputs_;

  std::vector<ProbeTemplate> template_plan_;
  std::vector<double> probe_schedule_;
  std::size_t next_probe_{0};
  std::vector<SAProbe> probes_;
  std::map<TargetId, std::vector<std::pair<double, int>>> support_trend_;

  std::vector<SessionEvent> log_;
};

// Subject selection retries before a probe template is skipped in favor of the next one.
constexpr int kProbeSubjectAttempts = 8;

}  // namespace hubsim
