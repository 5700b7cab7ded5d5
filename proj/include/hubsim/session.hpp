#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hubsim/engine.hpp"
#include "hubsim/scenario.hpp"

namespace hubsim {

constexpr int kProtocolVersion = 1;
constexpr std::string_view kProtocolName = "hubsim-session";

struct SessionOptions {
  bool pause_on_disconnect{true};
  std::optional<std::filesystem::path> log_path;  // event log written as the trial runs
  std::optional<std::filesystem::path> result_path;  // metrics JSON written at trial end
};

// Protocol state machine for one operator connection. No I/O beyond the event
// log: the caller moves messages to and from the socket.
//
// Server -> client: hello, snapshot, diff, command_result, probe, trial_end, error.
// Client -> server: hello, command, probe_answer, ui_event, resync.
class Session {
 public:
  Session(Scenario scenario, SessionOptions options);

  // A new operator attached. Returns hello plus a full snapshot.
  std::vector<nlohmann::json> connect();
  void disconnect();
  bool connected() const { return connected_; }

  // Handles one client message. Inputs are queued for the next tick; replies
  // (errors, resync snapshots) are returned immediately.
  std::vector<nlohmann::json> handle(const nlohmann::json& message);
  std::vector<nlohmann::json> handle_line(const std::string& line);

  // Runs one tick when the session is live and returns the messages it produced.
  std::vector<nlohmann::json> tick();

  bool running() const;
  bool finished() const { return engine_.finished(); }
  const Engine& engine() const { return engine_; }
  std::uint64_t frame() const { return frame_; }

 private:
  nlohmann::json full_snapshot();
  nlohmann::json state() const;
  void persist(const std::vector<SessionEvent>& events);
  nlohmann::json finish();

  Scenario scenario_;
  SessionOptions options_;
  Engine engine_;
  bool connected_{false};
  bool ever_connected_{false};
  std::uint64_t frame_{0};
  nlohmann::json last_state_;
  std::ofstream log_;
  bool finish_sent_{false};
};

nlohmann::json protocol_message(std::string_view type, nlohmann::json body = nlohmann::json::object());

// Accepts operator connections on `port` (0 picks a free one; `on_listen` receives
// the bound port) and drives the session until the trial ends or `stop` is set.
// `speed` scales real-time pacing; 0 runs unpaced.
void serve(Session& session, std::uint16_t port, double speed, const std::atomic<bool>& stop,
           const std::function<void(std::uint16_t)>& on_listen = {});

}  // namespace hubsim
