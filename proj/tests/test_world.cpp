#include <algorithm>

#include "doctest.h"

#include "hubsim/world.hpp"

using namespace hubsim;

namespace {

Target make_target(int id, Vec2 pos, int value) {
  Target t;
  t.id = target_id(id);
  t.position = pos;
  t.value = value;
  return t;
}

// Independent predicate oracles, written against the raw layout.
double min_top_distance(const WorldLayout& w, Vec2 hub) {
  double best = 1e18;
  for (const auto& t : w.targets)
    if (t.value >= kTopQuartileValue) best = std::min(best, std::hypot(t.position.x - hub.x, t.position.y - hub.y));
  return best;
}

}  // namespace

TEST_CASE("in_range is a closed 500 m disk") {
  CHECK(in_range(Vec2{0, 0}, make_target(0, {499.9, 0}, 80)));
  CHECK(in_range(Vec2{0, 0}, make_target(0, {500.0, 0}, 80)));
  CHECK_FALSE(in_range(Vec2{0, 0}, make_target(0, {500.1, 0}, 80)));
  CHECK(in_range(Vec2{100, 100}, make_target(0, {100 + 300, 100 + 400}, 80)));
}

TEST_CASE("easy layouts put two top-quartile targets within 250 m of every hub") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    TrialConfig cfg;
    cfg.difficulty = Difficulty::Easy;
    Rng rng = make_stream(seed, 0);
    const WorldLayout w = generate_trial(cfg, rng);
    REQUIRE(w.targets.size() == 16);
    REQUIRE(w.hubs.size() == 4);
    for (auto hub : w.hubs) {
      const auto near_top = std::count_if(w.targets.begin(), w.targets.end(), [&](const Target& t) {
        return t.value >= kTopQuartileValue && std::hypot(t.position.x - hub.x, t.position.y - hub.y) <= 250.0;
      });
      CHECK(near_top >= 2);
      CHECK(min_top_distance(w, hub) <= 250.0);
    }
    for (const auto& t : w.targets) {
      CHECK(t.value >= 67);
      CHECK(t.value <= 100);
    }
    CHECK(coverage_predicate(w));
  }
}

TEST_CASE("hard layouts keep every top-quartile target beyond 350 m") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    TrialConfig cfg;
    cfg.difficulty = Difficulty::Hard;
    Rng rng = make_stream(seed, 0);
    const WorldLayout w = generate_trial(cfg, rng);
    for (auto hub : w.hubs) {
      CHECK(min_top_distance(w, hub) >= 350.0);
      const bool decoy = std::any_of(w.targets.begin(), w.targets.end(), [&](const Target& t) {
        return t.value < kTopQuartileValue && std::hypot(t.position.x - hub.x, t.position.y - hub.y) <= 250.0;
      });
      CHECK(decoy);
      const auto in = std::count_if(w.targets.begin(), w.targets.end(), [&](const Target& t) { return in_range(hub, t); });
      CHECK(in >= 2);
    }
    const bool shared = std::any_of(w.targets.begin(), w.targets.end(), [&](const Target& t) {
      return std::count_if(w.hubs.begin(), w.hubs.end(), [&](Vec2 h) { return in_range(h, t); }) >= 2;
    });
    CHECK(shared);
    for (const auto& t : w.targets) CHECK((t.value >= 67 && t.value <= 100));
  }
}

TEST_CASE("generation is deterministic per seed") {
  TrialConfig cfg;
  Rng a = make_stream(42, 0), b = make_stream(42, 0);
  const WorldLayout wa = generate_trial(cfg, a), wb = generate_trial(cfg, b);
  REQUIRE(wa.targets.size() == wb.targets.size());
  for (std::size_t i = 0; i < wa.targets.size(); ++i) {
    CHECK(wa.targets[i].position == wb.targets[i].position);
    CHECK(wa.targets[i].value == wb.targets[i].value);
  }
}

TEST_CASE("trial config validation") {
  TrialConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_targets = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

namespace {

struct Arena {
  std::vector<Collective> collectives;
  Target target = make_target(5, {400, 400}, 95);
  std::vector<EventPayload> out;
  Rng rng = make_stream(9, 0);

  Arena() {
    collectives.push_back(Collective::create(collective_id(0), {0, 0}, Model::M2));
    collectives.push_back(Collective::create(collective_id(1), {800, 0}, Model::M2));
    for (auto& c : collectives) c.previous_hub = c.hub_position;
  }
};

}  // namespace

TEST_CASE("single mover establishes its hub") {
  Arena a;
  const MoveOutcome m = resolve_hub_move(a.collectives[0], a.target, a.collectives, 0.0, a.rng, a.out);
  CHECK(m.established());
  CHECK(a.target.occupied);
  CHECK(a.collectives[0].hub_position == a.target.position);
}

TEST_CASE("contested target: first arrival establishes, second returns") {
  Arena a;
  // Arrival order 312.4 s then 318.9 s.
  const MoveOutcome first = resolve_hub_move(a.collectives[0], a.target, a.collectives, 0.0, a.rng, a.out);
  const MoveOutcome second = resolve_hub_move(a.collectives[1], a.target, a.collectives, 0.0, a.rng, a.out);
  CHECK(first.established());
  CHECK_FALSE(second.established());
  CHECK(a.collectives[1].hub_position == Vec2{800, 0});

  TrialProgress progress;
  std::vector<EventPayload> out;
  advance_decision(a.collectives[0], progress, 2, 312.4, out);
  advance_decision(a.collectives[1], progress, 2, 318.9, out);
  CHECK(progress.decisions == 2);
  CHECK(a.collectives[1].decisions_made == 1);
  advance_decision(a.collectives[1], progress, 2, 400.0, out);
  CHECK(a.collectives[1].decisions_made == 2);
  CHECK(a.collectives[1].idle);
}

TEST_CASE("exactly one establishment under any arrival interleaving") {
  for (int trial = 0; trial < 1000; ++trial) {
    Rng order = make_stream(static_cast<std::uint64_t>(trial), 5);
    std::vector<Collective> cs;
    for (int i = 0; i < 4; ++i) cs.push_back(Collective::create(collective_id(i), {i * 100.0, 0}, Model::M2, 10));
    Target t = make_target(1, {200, 200}, 90);
    std::vector<int> idx{0, 1, 2, 3};
    std::shuffle(idx.begin(), idx.end(), order);
    const int movers = uniform_int(order, 1, 4);
    int established = 0;
    std::vector<EventPayload> out;
    for (int k = 0; k < movers; ++k)
      established += resolve_hub_move(cs[idx[k]], t, cs, 0.02, order, out).established();
    CHECK(established == 1);
  }
}

TEST_CASE("termination: eight decisions, or six after the time limit") {
  TrialProgress p;
  p.component_start = 0.0;
  p.decisions = 8;
  CHECK(p.should_end(570.0));
  p.decisions = 6;
  CHECK(p.should_end(605.0));
  CHECK_FALSE(p.should_end(599.0));
  p.decisions = 5;
  CHECK_FALSE(p.should_end(605.0));
  p.decisions = 7;
  CHECK_FALSE(p.should_end(600.0));
}

TEST_CASE("ground-truth best ignores occupied and out-of-range targets") {
  std::vector<Target> ts{make_target(0, {100, 0}, 80), make_target(1, {200, 0}, 99), make_target(2, {600, 0}, 100)};
  CHECK(ground_truth_best_value(ts, {0, 0}) == 99);
  ts[1].occupied = true;
  CHECK(ground_truth_best_value(ts, {0, 0}) == 80);
}
