#include "hubsim/session.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "hubsim/headless.hpp"

namespace hubsim {

using json = nlohmann::json;

json protocol_message(std::string_view type, json body) {
  body["v"] = kProtocolVersion;
  body["type"] = type;
  return body;
}

namespace {

json error_message(const std::string& reason) { return protocol_message("error", {{"reason", reason}}); }

// Probe prompt as the operator sees it: no ground truth, no correctness.
json probe_prompt(const SAProbe& p) {
  json j{{"index", p.index},
         {"level", to_string(p.level)},
         {"template", to_string(p.templ)},
         {"question", question_text(p.templ, p.subject_collective, p.subject_target)},
         {"ask_time", p.ask_time},
         {"expires", response_window_end(p)}};
  j["collective"] = p.subject_collective ? json(to_int(*p.subject_collective)) : json(nullptr);
  j["target"] = p.subject_target ? json(to_int(*p.subject_target)) : json(nullptr);
  return j;
}

}  // namespace

Session::Session(Scenario scenario, SessionOptions options)
    : scenario_(std::move(scenario)), options_(std::move(options)), engine_(scenario_) {
  if (options_.log_path) {
    if (options_.log_path->has_parent_path()) std::filesystem::create_directories(options_.log_path->parent_path());
    log_.open(*options_.log_path, std::ios::binary | std::ios::trunc);
    if (!log_) throw std::runtime_error("cannot write event log " + options_.log_path->string());
    log_ << log_header(scenario_, PolicyKind::Human, Responder::None).dump() << '\n';
    persist(engine_.events());
  }
}

json Session::state() const { return engine_.snapshot_json(scenario_.visualization == VisualizationMode::IA); }

json Session::full_snapshot() {
  last_state_ = state();
  ++frame_;
  return protocol_message("snapshot", {{"frame", frame_}, {"seq", engine_.last_seq()}, {"state", last_state_}});
}

std::vector<json> Session::connect() {
  connected_ = true;
  ever_connected_ = true;
  std::vector<json> out;
  out.push_back(protocol_message("hello", {{"protocol", kProtocolName},
                                           {"version", kProtocolVersion},
                                           {"scenario", scenario_.name},
                                           {"visualization", to_string(scenario_.visualization)},
                                           {"tick_hz", 10}}));
  out.push_back(full_snapshot());
  for (const auto& p : engine_.probes())
    if (unanswered_and_open(p, engine_.now())) out.push_back(protocol_message("probe", {{"probe", probe_prompt(p)}}));
  return out;
}

void Session::disconnect() { connected_ = false; }

bool Session::running() const {
  if (!ever_connected_ || engine_.finished()) return false;
  return connected_ || !options_.pause_on_disconnect;
}

std::vector<json> Session::handle_line(const std::string& line) {
  json message;
  try {
    message = json::parse(line);
  } catch (const json::parse_error& e) {
    return {error_message(std::string("malformed message: ") + e.what())};
  }
  return handle(message);
}

std::vector<json> Session::handle(const json& message) {
  if (!message.is_object() || !message.contains("type") || !message["type"].is_string())
    return {error_message("message must be an object with a string type")};
  if (message.contains("v") && message["v"] != kProtocolVersion)
    return {error_message("unsupported protocol version")};
  const std::string type = message["type"];
  if (engine_.finished() && type != "hello" && type != "resync") return {error_message("trial has ended")};
  try {
    if (type == "hello") return {};
    if (type == "resync") return {full_snapshot()};
    if (type == "command") {
      OperatorCommand cmd = command_from_json(message.at("command"));
      cmd.issued_at = engine_.now();
      engine_.submit(cmd);
      return {};
    }
    if (type == "probe_answer") {
      engine_.submit(ProbeAnswerInput{message.at("index").get<int>(), answer_from_json(message.at("answer"))});
      return {};
    }
    if (type == "ui_event") {
      engine_.submit(interaction_from_json(message.at("event")));
      return {};
    }
  } catch (const std::exception& e) {
    return {error_message("invalid " + type + ": " + e.what())};
  }
  return {error_message("unknown message type: " + type)};
}

void Session::persist(const std::vector<SessionEvent>& events) {
  if (!log_.is_open()) return;
  for (const auto& e : events) log_ << event_line(e) << '\n';
  log_.flush();
}

std::vector<json> Session::tick() {
  std::vector<json> out;
  if (!running()) return out;
  const auto events = engine_.step();
  persist(events);

  for (const auto& e : events) {
    if (const auto* r = std::get_if<CommandResult>(&e.payload)) {
      json body{{"command", to_json(r->command)}, {"accepted", r->verdict.accepted}};
      body["assignment_id"] = r->assignment_id ? json(*r->assignment_id) : json(nullptr);
      if (!r->verdict.accepted) {
        body["cause"] = to_string(r->verdict.cause);
        body["message"] = r->verdict.text;
      }
      out.push_back(protocol_message("command_result", body));
    } else if (const auto* p = std::get_if<ProbeAsked>(&e.payload)) {
      out.push_back(protocol_message("probe", {{"probe", probe_prompt(p->probe)}}));
    }
  }

  json next = state();
  const std::uint64_t base = frame_;
  ++frame_;
  out.push_back(protocol_message(
      "diff", {{"frame", frame_}, {"base_frame", base}, {"seq", engine_.last_seq()}, {"patch", json::diff(last_state_, next)}}));
  last_state_ = std::move(next);

  if (engine_.finished() && !finish_sent_) out.push_back(finish());
  return out;
}

json Session::finish() {
  finish_sent_ = true;
  const TrialResult r = compute_result(scenario_, PolicyKind::Human, Responder::None, engine_.events());
  const json metrics = to_json(r);
  if (options_.result_path) {
    if (options_.result_path->has_parent_path())
      std::filesystem::create_directories(options_.result_path->parent_path());
    std::ofstream(*options_.result_path) << metrics.dump(2) << '\n';
  }
  return protocol_message("trial_end", {{"seq", engine_.last_seq()}, {"result", metrics}});
}

// --- TCP transport -----------------------------------------------------------

namespace {

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

[[noreturn]] void sys_fail(const std::string& what) { throw std::runtime_error(what + ": " + std::strerror(errno)); }

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

bool send_messages(int fd, const std::vector<json>& messages) {
  std::string data;
  for (const auto& m : messages) data += m.dump() + '\n';
  return data.empty() || send_all(fd, data);
}

}  // namespace

void serve(Session& session, std::uint16_t port, double speed, const std::atomic<bool>& stop,
           const std::function<void(std::uint16_t)>& on_listen) {
  Fd listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (!listener) sys_fail("socket");
  const int yes = 1;
  ::setsockopt(listener.get(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listener.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) sys_fail("bind");
  if (::listen(listener.get(), 4) < 0) sys_fail("listen");
  socklen_t len = sizeof addr;
  ::getsockname(listener.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listen) on_listen(ntohs(addr.sin_port));

  using Clock = std::chrono::steady_clock;
  const auto period = speed > 0.0 ? std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(0.1 / speed))
                                  : Clock::duration::zero();
  auto next_tick = Clock::now();
  Fd client;
  std::string inbox;

  const auto drop_client = [&] {
    client.reset();
    inbox.clear();
    session.disconnect();
  };

  while (!stop.load()) {
    const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(next_tick - Clock::now()).count();
    const int timeout = session.running() ? static_cast<int>(std::max<long long>(0, wait)) : 100;
    pollfd fds[2] = {{listener.get(), POLLIN, 0}, {client ? client.get() : -1, POLLIN, 0}};
    if (::poll(fds, 2, timeout) < 0) {
      if (errno == EINTR) continue;
      sys_fail("poll");
    }

    if (fds[0].revents & POLLIN) {
      Fd incoming(::accept(listener.get(), nullptr, nullptr));
      if (incoming) {
        if (client) {
          send_messages(incoming.get(), {error_message("an operator is already connected")});
        } else {
          client = std::move(incoming);
          if (!send_messages(client.get(), session.connect())) drop_client();
          next_tick = Clock::now() + period;
        }
      }
    }

    if (client && (fds[1].revents & (POLLIN | POLLHUP | POLLERR))) {
      char buf[4096];
      const ssize_t n = ::recv(client.get(), buf, sizeof buf, 0);
      if (n <= 0) {
        drop_client();
      } else {
        inbox.append(buf, static_cast<std::size_t>(n));
        std::size_t nl;
        while (client && (nl = inbox.find('\n')) != std::string::npos) {
          const std::string line = inbox.substr(0, nl);
          inbox.erase(0, nl + 1);
          if (line.empty()) continue;
          if (!send_messages(client.get(), session.handle_line(line))) drop_client();
        }
      }
    }

    if (session.running() && Clock::now() >= next_tick) {
      const auto messages = session.tick();
      if (client && !send_messages(client.get(), messages)) drop_client();
      next_tick += period;
      if (period == Clock::duration::zero() || next_tick < Clock::now() - std::chrono::seconds(1)) next_tick = Clock::now();
    }
    if (session.finished() && !session.running()) {
      if (!client) break;
      // Let the operator read the final report, then close.
      if (session.frame() > 0) break;
    }
  }
}

}  // namespace hubsim
