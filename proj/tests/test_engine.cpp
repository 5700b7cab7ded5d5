#include <sstream>

#include "doctest.h"

#include "hubsim/headless.hpp"

using namespace hubsim;

namespace {

Scenario short_scenario(Model m, std::uint64_t seed) {
  Scenario s = make_scenario(m, seed);
  s.trial.max_component_duration = 600.0;
  return s;
}

std::string log_text(const Scenario& s, const RunOptions& o, const std::vector<SessionEvent>& events) {
  std::ostringstream out;
  out << log_header(s, o.policy, o.responder).dump() << '\n';
  for (const auto& e : events) out << event_line(e) << '\n';
  return out.str();
}

}  // namespace

TEST_CASE("identical seed and trace give byte-identical logs") {
  const Scenario s = short_scenario(Model::M3, 5);
  const RunOptions o{PolicyKind::GreedyBest, Responder::Oracle};
  const auto a = run_headless(s, o);
  const auto b = run_headless(s, o);
  CHECK(log_text(s, o, a.events) == log_text(s, o, b.events));
  Scenario other = s;
  other.trial.seed = 6;
  CHECK(log_text(other, o, run_headless(other, o).events) != log_text(s, o, a.events));
}

TEST_CASE("replay reproduces events and metrics") {
  const Scenario s = short_scenario(Model::M3, 8);
  const RunOptions o{PolicyKind::ConsensusBoost, Responder::Oracle};
  const auto run = run_headless(s, o);
  std::istringstream in(log_text(s, o, run.events));
  const ReplayReport r = replay(parse_event_log(in));
  CHECK(r.events_identical);
  CHECK(r.metrics_identical);
  CHECK(to_json(r.result).dump() == to_json(run.result).dump());
}

TEST_CASE("truncated and corrupt logs name the last valid seq") {
  const Scenario s = short_scenario(Model::M2, 2);
  const RunOptions o{PolicyKind::Null, Responder::None};
  const auto run = run_headless(s, o);
  const std::string text = log_text(s, o, run.events);

  // Cut in the middle of record 101.
  std::size_t pos = 0;
  for (int line = 0; line < 101; ++line) pos = text.find('\n', pos) + 1;
  {
    std::istringstream in(text.substr(0, pos + 10));
    try {
      parse_event_log(in);
      FAIL("expected a log error");
    } catch (const LogError& e) {
      CHECK(e.last_valid_seq() == 100);
    }
  }
  {
    std::string bad = text;
    bad.replace(pos, 1, "#");
    std::istringstream in(bad);
    try {
      parse_event_log(in);
      FAIL("expected a log error");
    } catch (const LogError& e) {
      CHECK(e.last_valid_seq() == 100);
    }
  }
  {
    // Whole records but no trial end.
    std::istringstream in(text.substr(0, pos));
    CHECK_THROWS_AS(parse_event_log(in), LogError);
  }
}

TEST_CASE("M3 without an operator never decides") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto run = run_headless(short_scenario(Model::M3, seed), {PolicyKind::Null, Responder::None});
    CHECK(run.result.decisions.empty());
    CHECK(run.result.sim_seconds >= 600.0);
  }
}

TEST_CASE("oracle responder answers every probe correctly") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto run = run_headless(short_scenario(Model::M2, seed), {PolicyKind::Null, Responder::Oracle});
    REQUIRE(run.result.probes.size() == 12);
    CHECK(*run.result.overall.sa.overall == doctest::Approx(100.0));
  }
}

TEST_CASE("probes are asked at fixed offsets from each component start") {
  const auto run = run_headless(short_scenario(Model::M2, 4), {PolicyKind::Null, Responder::None});
  std::vector<double> starts;
  for (const auto& e : run.events)
    if (std::holds_alternative<ComponentStart>(e.payload)) starts.push_back(e.sim_time());
  REQUIRE(starts.size() == 2);
  REQUIRE(run.result.probes.size() == 12);
  for (int k = 0; k < 12; ++k) {
    const double expected = starts[k / 6] + 50.0 + 60.0 * (k % 6);
    CHECK(run.result.probes[k].ask_time == doctest::Approx(expected));
  }
  int levels[3] = {0, 0, 0};
  for (const auto& p : run.result.probes) ++levels[static_cast<int>(p.level)];
  CHECK(levels[0] == 5);
  CHECK(levels[1] == 4);
  CHECK(levels[2] == 3);
}

TEST_CASE("queued inputs apply on the next tick in order") {
  Engine e(make_scenario(Model::M3, 3));
  e.run(5);
  OperatorCommand bad{CommandKind::Decide, collective_id(0), target_id(0)};
  e.submit(bad);
  e.submit(OperatorCommand{CommandKind::Investigate, collective_id(9), target_id(0)});
  const auto events = e.step();
  std::vector<const CommandResult*> results;
  for (const auto& ev : events)
    if (const auto* r = std::get_if<CommandResult>(&ev.payload)) results.push_back(r);
  REQUIRE(results.size() == 2);
  CHECK(results[0]->command.kind == CommandKind::Decide);
  CHECK(results[0]->command.issued_at == doctest::Approx(0.6));
  CHECK_FALSE(results[1]->verdict.accepted);
  CHECK(e.desk().messages.size() == 2);
}

TEST_CASE("operator snapshot hides undiscovered targets and ground truth") {
  Engine e(make_scenario(Model::M2, 12));
  for (int k = 0; k < 3000; ++k) {
    e.step();
    if (k % 500 != 0) continue;
    const auto snap = e.snapshot_json(false);
    for (const auto& t : snap["targets"]) {
      const Target* real = find_target(e.targets(), target_id(t["id"].get<int>()));
      REQUIRE(real != nullptr);
      CHECK(real->discovered());
      CHECK_FALSE(real->occupied);
      if (!real->valued()) CHECK(t["value"].is_null());
    }
    const std::string text = snap.dump();
    CHECK(text.find("ground_truth") == std::string::npos);
  }
}

TEST_CASE("population conservation and ledger consistency through a full trial") {
  Engine e(short_scenario(Model::M2, 21));
  while (!e.finished()) {
    e.step();
    for (const auto& c : e.collectives()) {
      const auto n = c.state_counts();
      REQUIRE(n[0] + n[1] + n[2] + n[3] == 200);
      REQUIRE(c.recompute_support() == c.support);
    }
  }
}
