#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "doctest.h"

#include "hubsim/headless.hpp"
#include "hubsim/session.hpp"

using namespace hubsim;
using nlohmann::json;

namespace {

std::vector<json> of_type(const std::vector<json>& msgs, std::string_view type) {
  std::vector<json> out;
  for (const auto& m : msgs)
    if (m["type"] == type) out.push_back(m);
  return out;
}

// Minimal console model: applies diffs and asks for a resync on a frame gap.
struct Console {
  json state;
  std::uint64_t frame{0};
  int resyncs{0};

  std::optional<json> apply(const json& m) {
    if (m["type"] == "snapshot") {
      state = m["state"];
      frame = m["frame"];
    } else if (m["type"] == "diff") {
      if (m["base_frame"] != frame) {
        ++resyncs;
        return protocol_message("resync");
      }
      state = state.patch(m["patch"]);
      frame = m["frame"];
    }
    return std::nullopt;
  }
};

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("hubsim-test-" + std::to_string(::getpid()) + "-" + name);
}

}  // namespace

TEST_CASE("hello, snapshot, and diffs keep the console in sync") {
  Session s(make_scenario(Model::M2, 3), {});
  CHECK_FALSE(s.running());
  const auto hello = s.connect();
  REQUIRE(hello.size() >= 2);
  CHECK(hello[0]["type"] == "hello");
  CHECK(hello[0]["version"] == kProtocolVersion);
  Console console;
  for (const auto& m : hello) console.apply(m);
  for (int k = 0; k < 50; ++k)
    for (const auto& m : s.tick()) CHECK_FALSE(console.apply(m));
  CHECK(console.state == s.engine().snapshot_json(true));
}

TEST_CASE("a frame gap triggers a resync that restores the state") {
  Session s(make_scenario(Model::M2, 3), {});
  Console console;
  for (const auto& m : s.connect()) console.apply(m);
  s.tick();  // dropped frame
  std::optional<json> request;
  for (const auto& m : s.tick())
    if (auto r = console.apply(m)) request = r;
  REQUIRE(request);
  CHECK(console.resyncs == 1);
  for (const auto& m : s.handle(*request)) console.apply(m);
  CHECK(console.state == s.engine().snapshot_json(true));
}

TEST_CASE("an accepted investigate shows up in the next snapshot's assignments") {
  Scenario sc = make_scenario(Model::M3, 4);
  Session s(sc, {});
  Console console;
  for (const auto& m : s.connect()) console.apply(m);
  // Wait until some collective has a valued target in range.
  std::optional<std::pair<int, int>> pick;
  for (int k = 0; k < 6000 && !pick; ++k) {
    for (const auto& m : s.tick()) console.apply(m);
    for (const auto& t : console.state["targets"])
      for (auto& [cid, outline] : t["outline"].items())
        if (t["valued"] && outline != "abandoned" && !pick) pick = {std::stoi(cid), t["id"].get<int>()};
  }
  REQUIRE(pick);
  CHECK(s.handle(protocol_message(
                     "command", {{"command", {{"kind", "investigate"}, {"collective", pick->first}, {"target", pick->second}}}}))
            .empty());
  const auto msgs = s.tick();
  const auto results = of_type(msgs, "command_result");
  REQUIRE(results.size() == 1);
  CHECK(results[0]["accepted"] == true);
  CHECK_FALSE(results[0].contains("highest_value_target"));
  for (const auto& m : msgs) console.apply(m);
  bool found = false;
  for (const auto& a : console.state["assignments"])
    found = found || (a["kind"] == "Investigate" && a["target"] == pick->second);
  CHECK(found);
}

TEST_CASE("malformed and unknown messages get an error reply") {
  Session s(make_scenario(Model::M2, 1), {});
  s.connect();
  CHECK(s.handle_line("{nope")[0]["type"] == "error");
  CHECK(s.handle(json{{"type", "teleport"}})[0]["type"] == "error");
  CHECK(s.handle(json{{"type", "command"}, {"command", {{"kind", "fly"}}}})[0]["type"] == "error");
  CHECK(s.handle(json{{"type", "hello"}, {"v", 99}})[0]["type"] == "error");
}

TEST_CASE("disconnect pauses the simulation unless configured otherwise") {
  Session paused(make_scenario(Model::M2, 1), {});
  paused.connect();
  paused.tick();
  paused.disconnect();
  const auto t = paused.engine().tick();
  paused.tick();
  CHECK(paused.engine().tick() == t);

  SessionOptions keep;
  keep.pause_on_disconnect = false;
  Session live(make_scenario(Model::M2, 1), keep);
  live.connect();
  live.disconnect();
  live.tick();
  CHECK(live.engine().tick() == 1);
}

TEST_CASE("probe prompts reach the operator without ground truth and answers are scored") {
  Scenario sc = make_scenario(Model::M2, 2);
  sc.components = {Difficulty::Easy};
  Session s(sc, {});
  s.connect();
  std::optional<json> probe;
  for (int k = 0; k < 600 && !probe; ++k)
    for (const auto& m : s.tick())
      if (m["type"] == "probe") probe = m["probe"];
  REQUIRE(probe);
  CHECK(probe->at("ask_time") == doctest::Approx(50.0));
  CHECK_FALSE(probe->contains("ground_truth"));
  const SAProbe& real = s.engine().probes().front();
  s.handle(protocol_message("probe_answer", {{"index", (*probe)["index"]}, {"answer", to_json(real.ground_truth)}}));
  s.tick();
  REQUIRE(s.engine().probes().front().response);
  CHECK(s.engine().probes().front().correct());
}

TEST_CASE("session log replays to the same metrics") {
  const auto log = temp_path("session.jsonl");
  Scenario sc = make_scenario(Model::M3, 6);
  sc.components = {Difficulty::Easy};
  sc.trial.max_component_duration = 400.0;
  sc.visualization = VisualizationMode::Collective;
  {
    SessionOptions o;
    o.log_path = log;
    Session s(sc, o);
    s.connect();
    Rng rng = make_stream(1, 77);
    int k = 0;
    while (!s.finished()) {
      if (k % 37 == 0) {
        InteractionEvent ui;
        ui.timestamp = s.engine().now();
        ui.kind = InteractionKind::Layout;
        ui.layout = LayoutCounts{uniform_int(rng, 0, 5), uniform_int(rng, 0, 5), uniform_int(rng, 0, 2), 0,
                                 VisualizationMode::IA};
        s.handle(protocol_message("ui_event", {{"event", to_json(ui)}}));
      }
      if (k % 53 == 0)
        s.handle(protocol_message("command", {{"command", {{"kind", "investigate"}, {"collective", k % 4}, {"target", k % 16}}}}));
      const auto msgs = s.tick();
      if (s.finished()) CHECK(of_type(msgs, "trial_end").size() == 1);
      ++k;
    }
  }
  const ReplayReport r = replay_file(log);
  CHECK(r.events_identical);
  CHECK(r.metrics_identical);
  CHECK_FALSE(r.result.layout.empty());
  std::filesystem::remove(log);
}

TEST_CASE("the TCP server accepts one operator and rejects a second") {
  Session s(make_scenario(Model::M2, 9), {});
  std::atomic<bool> stop{false};
  std::atomic<int> port{0};
  std::thread server([&] { serve(s, 0, 1.0, stop, [&](std::uint16_t p) { port = p; }); });
  while (port == 0) std::this_thread::sleep_for(std::chrono::milliseconds(5));

  const auto dial = [&] {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port.load()));
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    return fd;
  };
  const auto read_line = [](int fd) {
    std::string line;
    char ch;
    while (::recv(fd, &ch, 1, 0) == 1 && ch != '\n') line += ch;
    return line;
  };

  const int first = dial();
  CHECK(json::parse(read_line(first))["type"] == "hello");
  CHECK(json::parse(read_line(first))["type"] == "snapshot");
  const int second = dial();
  const json rejected = json::parse(read_line(second));
  CHECK(rejected["type"] == "error");
  ::close(second);
  CHECK(json::parse(read_line(first))["type"] == "diff");

  ::close(first);
  stop = true;
  server.join();
}
