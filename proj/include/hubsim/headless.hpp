#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hubsim/engine.hpp"
#include "hubsim/metrics.hpp"
#include "hubsim/policy.hpp"
#include "hubsim/scenario.hpp"

namespace hubsim {

constexpr std::string_view kLogFormat = "hubsim-event-log";
constexpr int kLogVersion = 1;

enum class Responder { None, Oracle };

std::string_view to_string(Responder r);
Responder parse_responder(std::string_view s);

struct RunOptions {
  PolicyKind policy{PolicyKind::Null};
  Responder responder{Responder::Oracle};
  std::int64_t max_ticks{INT64_MAX};
};

struct TrialResult {
  Scenario scenario;
  PolicyKind policy{PolicyKind::Null};
  Responder responder{Responder::None};
  std::vector<DecisionRecord> decisions;
  std::vector<SAProbe> probes;
  std::vector<CommandResult> commands;
  std::vector<InteractionEvent> interactions;
  std::vector<LayoutSample> layout;
  std::vector<ComponentEnd> components;
  PerformanceMetrics overall;
  PerformanceMetrics easy;
  PerformanceMetrics hard;
  InteractionSummary interaction;
  std::vector<ProbeClutter> clutter;
  std::vector<ProbeDistances> distances;
  double sim_seconds{0.0};
  std::uint64_t event_count{0};
};

// Every metric is a function of the event log alone.
TrialResult compute_result(const Scenario& scenario, PolicyKind policy, Responder responder,
                           const std::vector<SessionEvent>& events);

nlohmann::json to_json(const TrialResult& r);
nlohmann::json to_json(const PerformanceMetrics& m);
nlohmann::json to_json(const InteractionSummary& s);

struct HeadlessRun {
  TrialResult result;
  std::vector<SessionEvent> events;
};

// Runs a whole trial with a scripted operator and probe responder.
HeadlessRun run_headless(const Scenario& scenario, const RunOptions& options);

// Oracle probe responder: answers each open probe with its recorded ground truth.
void oracle_answers(const Engine& engine, std::vector<ProbeAnswerInput>& out);

// --- Event log -------------------------------------------------------------

nlohmann::json log_header(const Scenario& scenario, PolicyKind policy, Responder responder);
std::string event_line(const SessionEvent& e);
void write_event_log(const std::filesystem::path& path, const nlohmann::json& header,
                     const std::vector<SessionEvent>& events);

struct EventLog {
  nlohmann::json header;
  Scenario scenario;
  PolicyKind policy{PolicyKind::Null};
  Responder responder{Responder::None};
  std::vector<SessionEvent> events;
  std::vector<std::string> lines;
};

class LogError : public std::runtime_error {
 public:
  LogError(const std::string& what, std::uint64_t last_valid_seq)
      : std::runtime_error(what + " (last valid seq " + std::to_string(last_valid_seq) + ")"),
        last_valid_seq_(last_valid_seq) {}
  std::uint64_t last_valid_seq() const { return last_valid_seq_; }

 private:
  std::uint64_t last_valid_seq_;
};

// Throws LogError naming the last valid seq when the log is corrupt or truncated.
EventLog read_event_log(const std::filesystem::path& path);
EventLog parse_event_log(std::istream& in);

struct ReplayReport {
  TrialResult result;
  bool events_identical{false};
  bool metrics_identical{false};
  std::optional<std::uint64_t> first_mismatch_seq;
  std::uint64_t events_replayed{0};
};

// Re-simulates from the header and the logged operator inputs, compares the
// regenerated stream line by line, and recomputes every metric.
ReplayReport replay(const EventLog& log);
ReplayReport replay_file(const std::filesystem::path& path);

// Engine inputs recorded in an event log, grouped by the tick they were applied on.
std::map<std::int64_t, std::vector<EngineInput>> logged_inputs(const std::vector<SessionEvent>& events);

// Default output directory: $HUBSIM_OUTPUT_DIR or ./hubsim-out.
std::filesystem::path default_output_dir();

}  // namespace hubsim
