#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hubsim/headless.hpp"
#include "hubsim/metrics.hpp"
#include "hubsim/protocol.hpp"

using namespace hubsim;

namespace {

struct Outcome {
  bool pass{true};
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Exact rational value of the clutter formula, in percent.
long double clutter_exact(long long h, long long t, long long wt, long long wc, bool ia) {
  const long long area = 493414 + 9856 + h * 2350 + t * 1720 + (ia ? 51200 : 0) + wt * 32922 + wc * 25740;
  return static_cast<long double>(area) * 100.0L / 2073600.0L;
}

double rel_err(double got, long double want) {
  return static_cast<double>(std::fabs(static_cast<long double>(got) - want) / std::fabs(want));
}

Outcome clutter_exactness() {
  Outcome o;
  struct Ref {
    LayoutCounts c;
    double shown;
  };
  const Ref refs[] = {{{0, 0, 0, 0, VisualizationMode::Collective}, 24.2704},
                      {{0, 0, 0, 0, VisualizationMode::IA}, 26.7395},
                      {{2, 3, 1, 1, VisualizationMode::Collective}, 27.5748}};
  double worst = 0.0;
  for (const auto& r : refs) {
    const double got = global_clutter(r.c);
    const long double exact = clutter_exact(r.c.highlighted_targets, r.c.plain_targets, r.c.target_windows,
                                            r.c.collective_windows, r.c.mode == VisualizationMode::IA);
    worst = std::max(worst, rel_err(got, exact));
    if (std::round(got * 1e4) / 1e4 != r.shown) o.pass = false;
  }
  if (worst >= 1e-9) o.pass = false;

  const long double offset = 51200.0L / 2073600.0L * 100.0L;
  Rng rng = make_stream(7, 0);
  int linear_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const int h = uniform_int(rng, 0, 16), t = uniform_int(rng, 0, 16), wt = uniform_int(rng, 0, 16),
              wc = uniform_int(rng, 0, 4);
    const double col = global_clutter({h, t, wt, wc, VisualizationMode::Collective});
    const double ia = global_clutter({h, t, wt, wc, VisualizationMode::IA});
    bool ok = rel_err(col, clutter_exact(h, t, wt, wc, false)) < 1e-9 && rel_err(ia, clutter_exact(h, t, wt, wc, true)) < 1e-9;
    ok = ok && rel_err(ia - col, offset) < 1e-9;
    // Each count contributes independently: f(a + b) - f(0) = (f(a) - f(0)) + (f(b) - f(0)).
    const double base = global_clutter({0, 0, 0, 0, VisualizationMode::Collective});
    const double parts = (global_clutter({h, 0, 0, 0, VisualizationMode::Collective}) - base) +
                         (global_clutter({0, t, 0, 0, VisualizationMode::Collective}) - base) +
                         (global_clutter({0, 0, wt, 0, VisualizationMode::Collective}) - base) +
                         (global_clutter({0, 0, 0, wc, VisualizationMode::Collective}) - base);
    ok = ok && std::fabs((col - base) - parts) <= 1e-9 * std::max(1.0, col);
    if (!ok) ++linear_failures;
  }
  if (linear_failures != 0) o.pass = false;
  o.detail = fmt("max rel err %.2e, linearity/offset failures %d of 1000", worst, linear_failures);
  return o;
}

// Transitions caused directly by operator commands.
bool command_cause(TransitionCause c) {
  return c == TransitionCause::Investigate || c == TransitionCause::Abandon || c == TransitionCause::Decide;
}

struct FuzzStats {
  long ticks{0};
  long commands{0};
  long accepted{0};
  long locked_rejections{0};
  long repeat_abandons{0};
  long establishments{0};
  std::vector<std::string> violations;

  void fail(std::string what) {
    if (violations.size() < 5) violations.push_back(std::move(what));
    else if (violations.size() == 5) violations.push_back("...");
  }
};

OperatorCommand random_command(const Engine& e, Rng& rng) {
  OperatorCommand cmd;
  cmd.collective = collective_id(uniform_int(rng, 0, 3));
  const Collective& c = e.collectives()[static_cast<std::size_t>(to_int(cmd.collective))];
  const int kind = uniform_int(rng, 0, 9);
  if (kind <= 3) cmd.kind = CommandKind::Investigate;
  else if (kind <= 6) cmd.kind = CommandKind::Abandon;
  else if (kind <= 8) cmd.kind = CommandKind::Decide;
  else cmd.kind = CommandKind::CancelAbandon;

  if (cmd.kind == CommandKind::CancelAbandon) {
    cmd.assignment_id = uniform_int(rng, 0, e.desk().assignments.next_id());
    return cmd;
  }
  if (cmd.kind == CommandKind::Decide && !c.support.empty() && bernoulli(rng, 0.7)) {
    const auto best = std::max_element(c.support.begin(), c.support.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    cmd.target = best->first;
    return cmd;
  }
  // Mostly real targets, occasionally an id that does not exist.
  cmd.target = target_id(uniform_int(rng, 0, static_cast<int>(e.targets().size())));
  return cmd;
}

void fuzz_seed(std::uint64_t seed, int n_events, FuzzStats& st) {
  static constexpr Model models[] = {Model::M1, Model::M2, Model::M3};
  Rng rng = make_stream(seed, 77);
  int restarts = 0;
  auto fresh = [&] {
    Scenario s = make_scenario(models[seed % 3], seed * 1000 + static_cast<std::uint64_t>(restarts++));
    return Engine(std::move(s));
  };
  Engine e = fresh();
  std::map<std::pair<int, int>, int> established_per_target;  // (component, target)

  for (int ev = 0; ev < n_events; ++ev) {
    if (e.finished()) {
      e = fresh();
      established_per_target.clear();
    }
    if (bernoulli(rng, 0.35)) {
      OperatorCommand cmd = random_command(e, rng);
      e.submit(cmd);
      ++st.commands;
      // Duplicate some abandons back to back to exercise idempotence.
      if (cmd.kind == CommandKind::Abandon && bernoulli(rng, 0.5)) {
        e.submit(cmd);
        ++st.commands;
      }
      continue;
    }

    std::vector<bool> locked;
    for (const auto& c : e.collectives()) locked.push_back(c.decide_locked);
    const auto events = e.step();
    ++st.ticks;

    const CommandResult* last = nullptr;
    const CommandResult* prev = nullptr;
    int effects_of_last = 0;
    auto close_command = [&] {
      if (last == nullptr) return;
      if (!last->verdict.accepted && effects_of_last != 0)
        st.fail(fmt("seed %llu: rejected command changed %d entities", (unsigned long long)seed, effects_of_last));
      if (prev != nullptr && last->command.kind == CommandKind::Abandon && prev->command.kind == CommandKind::Abandon &&
          prev->command.collective == last->command.collective && prev->command.target == last->command.target &&
          prev->verdict.accepted) {
        ++st.repeat_abandons;
        if (effects_of_last != 0)
          st.fail(fmt("seed %llu: repeated abandon moved %d entities", (unsigned long long)seed, effects_of_last));
      }
    };
    for (const auto& ev_ : events) {
      if (const auto* r = std::get_if<CommandResult>(&ev_.payload)) {
        close_command();
        prev = last;
        last = r;
        effects_of_last = 0;
        if (r->verdict.accepted) ++st.accepted;
        const auto k = static_cast<std::size_t>(to_int(r->command.collective));
        if (k < locked.size() && locked[k]) {
          ++st.locked_rejections;
          if (r->verdict.accepted || r->verdict.cause != IllegalCause::DecideLocked)
            st.fail(fmt("seed %llu: command accepted while decide-locked", (unsigned long long)seed));
        }
        if (k < locked.size() && r->verdict.accepted && r->command.kind == CommandKind::Decide) locked[k] = true;
      } else if (const auto* t = std::get_if<EntityTransition>(&ev_.payload)) {
        if (command_cause(t->cause)) {
          if (last == nullptr) st.fail("command transition without a command");
          else if (t->collective != last->command.collective) st.fail("command transition on the wrong collective");
          else ++effects_of_last;
        }
      } else if (const auto* m = std::get_if<HubMove>(&ev_.payload)) {
        if (m->outcome == MoveOutcomeKind::Established) {
          ++st.establishments;
          if (++established_per_target[{e.component(), to_int(m->target)}] > 1)
            st.fail(fmt("seed %llu: target %d established twice", (unsigned long long)seed, to_int(m->target)));
        }
      }
    }
    close_command();

    for (const auto& c : e.collectives()) {
      const auto n = c.state_counts();
      if (c.population() != 200 || n[0] + n[1] + n[2] + n[3] != 200)
        st.fail(fmt("seed %llu: population not conserved", (unsigned long long)seed));
      if (c.recompute_support() != c.support)
        st.fail(fmt("seed %llu: support ledger drifted", (unsigned long long)seed));
      for (TargetId t : c.abandoned)
        if (c.support_for(t) != 0) st.fail(fmt("seed %llu: abandoned target has support", (unsigned long long)seed));
    }
    // Occupied targets are exactly those a collective established on this component.
    for (const auto& t : e.targets()) {
      const auto it = established_per_target.find({e.component(), to_int(t.id)});
      if (t.occupied != (it != established_per_target.end()))
        st.fail(fmt("seed %llu: occupancy disagrees with hub moves", (unsigned long long)seed));
    }
  }
}

Outcome invariant_fuzz() {
  FuzzStats st;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) fuzz_seed(seed, 10000, st);
  Outcome o;
  o.pass = st.violations.empty() && st.locked_rejections > 0 && st.repeat_abandons > 0 && st.establishments > 0;
  o.detail = fmt("%ld ticks, %ld commands (%ld accepted), %ld locked rejections, %ld repeat abandons, %ld hub moves",
                 st.ticks, st.commands, st.accepted, st.locked_rejections, st.repeat_abandons, st.establishments);
  for (const auto& v : st.violations) o.detail += "; " + v;
  return o;
}

struct DecisionStats {
  int n{0};
  int successes{0};
  double minutes{0.0};

  void add(const DecisionRecord& d) {
    ++n;
    successes += d.success();
    minutes += d.duration_minutes();
  }
  double success_pct() const { return n ? 100.0 * successes / n : 0.0; }
  double mean_minutes() const { return n ? minutes / n : 0.0; }
};

DecisionStats hard_decisions(Model model, int min_decisions) {
  DecisionStats st;
  for (std::uint64_t seed = 1; st.n < min_decisions; ++seed) {
    const auto run = run_headless(make_scenario(model, seed, Difficulty::Hard), {PolicyKind::Null, Responder::None});
    for (const auto& d : run.result.decisions) st.add(d);
  }
  return st;
}

Outcome model_separation() {
  const DecisionStats m1 = hard_decisions(Model::M1, 400);
  const DecisionStats m2 = hard_decisions(Model::M2, 400);
  Outcome o;
  const double gap = m2.success_pct() - m1.success_pct();
  o.pass = m1.n >= 200 && m2.n >= 200 && gap >= 10.0 && m2.mean_minutes() >= m1.mean_minutes();
  o.detail = fmt("M2 %.1f%% in %.2f min (n=%d) vs M1 %.1f%% in %.2f min (n=%d), gap %.1f pts", m2.success_pct(),
                 m2.mean_minutes(), m2.n, m1.success_pct(), m1.mean_minutes(), m1.n, gap);
  return o;
}

Outcome m3_needs_operator() {
  Outcome o;
  int null_decisions = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    // No operator at all: nothing is ever submitted.
    Engine e(make_scenario(Model::M3, seed));
    if (e.run(6000) != 6000) o.pass = false;  // ten simulated minutes
    for (const auto& ev : e.events()) null_decisions += std::holds_alternative<DecisionRecord>(ev.payload);
  }
  DecisionStats greedy;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto run =
        run_headless(make_scenario(Model::M3, seed, Difficulty::Easy), {PolicyKind::GreedyBest, Responder::None});
    for (const auto& d : run.result.decisions) greedy.add(d);
  }
  o.pass = o.pass && null_decisions == 0 && greedy.n > 0 && greedy.success_pct() >= 95.0;
  o.detail = fmt("Null: %d decisions over 50 seeds x 10 min; GreedyBest easy: %.1f%% of %d decisions", null_decisions,
                 greedy.success_pct(), greedy.n);
  return o;
}

Outcome decision_time_band() {
  double all = 0.0, easy = 0.0, hard = 0.0;
  int n_all = 0, n_easy = 0, n_hard = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto run = run_headless(make_scenario(Model::M2, seed), {PolicyKind::Null, Responder::None});
    const auto& r = run.result;
    if (r.overall.decision_time_minutes) all += *r.overall.decision_time_minutes, ++n_all;
    if (r.easy.decision_time_minutes) easy += *r.easy.decision_time_minutes, ++n_easy;
    if (r.hard.decision_time_minutes) hard += *r.hard.decision_time_minutes, ++n_hard;
  }
  const double m_all = n_all ? all / n_all : 0.0, m_easy = n_easy ? easy / n_easy : 0.0,
               m_hard = n_hard ? hard / n_hard : 0.0;
  Outcome o;
  o.pass = n_all == 100 && m_all >= 2.0 && m_all <= 8.0 && n_easy == 100 && n_hard == 100 && m_easy < m_hard;
  o.detail = fmt("mean %.2f min; easy %.2f min < hard %.2f min (per-seed means over 100 seeds)", m_all, m_easy, m_hard);
  return o;
}

Outcome trial_protocol() {
  Outcome o;
  std::vector<std::string> problems;

  const auto sched = schedule_probes(123.4);
  if (sched.size() != 6) problems.push_back("schedule size");
  for (std::size_t k = 0; k < sched.size(); ++k)
    if (std::fabs(sched[k] - (123.4 + 50.0 + 60.0 * static_cast<double>(k))) > 1e-9) problems.push_back("schedule offset");

  int runs = 0;
  for (Model m : {Model::M1, Model::M2}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto run = run_headless(make_scenario(m, seed), {PolicyKind::Null, Responder::Oracle});
      ++runs;
      std::vector<double> starts;
      double start = 0.0;
      for (const auto& e : run.events) {
        if (std::holds_alternative<ComponentStart>(e.payload)) starts.push_back(start = e.sim_time());
        if (const auto* end = std::get_if<ComponentEnd>(&e.payload)) {
          const double elapsed = e.sim_time() - start;
          if (end->reason == TrialEndReason::DecisionsComplete && end->decisions != 8)
            problems.push_back("complete with fewer than 8 decisions");
          if (end->reason == TrialEndReason::DecisionCapAfterLimit && (end->decisions < 6 || elapsed <= 600.0))
            problems.push_back("cap rule fired early");
        }
      }
      if (starts.size() != 2 || run.result.probes.size() != 12) {
        problems.push_back("probe count");
        continue;
      }
      int per_component[2] = {0, 0};
      for (const auto& p : run.result.probes) {
        const int k = p.index;
        const int comp = k / 6;
        ++per_component[comp];
        const double want = starts[static_cast<std::size_t>(comp)] + 50.0 + 60.0 * (k % 6);
        if (std::fabs(p.ask_time - want) > 1e-9) problems.push_back("probe ask time");
      }
      if (per_component[0] != 6 || per_component[1] != 6) problems.push_back("probes per component");
    }
  }

  // Constructed termination edge cases, driven through decision bookkeeping.
  auto drive = [](int decisions, double at, double start) {
    TrialProgress p;
    p.component_start = start;
    std::vector<Collective> cs;
    for (int i = 0; i < 4; ++i) cs.push_back(Collective::create(collective_id(i), {0, 0}, Model::M1, 10));
    std::vector<EventPayload> out;
    bool ended = false;
    for (int d = 0; d < decisions; ++d) ended = advance_decision(cs[static_cast<std::size_t>(d % 4)], p, 2, at, out).trial_ended;
    return std::pair{ended, p};
  };
  struct Case {
    int decisions;
    double at;
    bool ends;
  };
  const Case cases[] = {{8, 120.0, true},  {7, 599.9, false}, {7, 1200.0, true}, {6, 599.9, false},
                        {6, 600.0, false}, {6, 600.1, true},  {5, 600.1, false}, {5, 5000.0, false}};
  int edge_cases = 0;
  for (const auto& c : cases) {
    const auto [ended, progress] = drive(c.decisions, c.at, 0.0);
    const bool later = progress.should_end(c.at);
    if (ended != c.ends || later != c.ends) problems.push_back(fmt("edge case %d@%.1f", c.decisions, c.at));
    ++edge_cases;
  }
  // Shifted component start: the ten-minute clock runs from the component's own start.
  {
    const auto [ended, progress] = drive(6, 900.0, 400.0);
    if (ended || progress.should_end(1000.0) || !progress.should_end(1000.1)) problems.push_back("shifted clock");
    ++edge_cases;
  }

  o.pass = problems.empty();
  o.detail = fmt("%d headless trials, %d termination edge cases", runs, edge_cases);
  for (std::size_t i = 0; i < problems.size() && i < 5; ++i) o.detail += "; " + problems[i];
  return o;
}

std::string log_text(const Scenario& s, PolicyKind p, Responder r, const std::vector<SessionEvent>& events) {
  std::ostringstream out;
  out << log_header(s, p, r).dump() << '\n';
  for (const auto& e : events) out << event_line(e) << '\n';
  return out.str();
}

// Engine run with a seeded random operator; returns the log text.
std::string random_trace_log(std::uint64_t seed) {
  Scenario s = make_scenario(Model::M2, seed);
  s.trial.max_component_duration = 900.0;
  Engine e(s);
  Rng rng = make_stream(seed, 99);
  std::vector<ProbeAnswerInput> answers;
  while (!e.finished()) {
    if (bernoulli(rng, 0.02)) e.submit(random_command(e, rng));
    answers.clear();
    oracle_answers(e, answers);
    for (auto& a : answers) e.submit(a);
    e.step();
  }
  return log_text(s, PolicyKind::Human, Responder::None, e.events());
}

Outcome determinism_replay() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "hubsim-acceptance";
  std::filesystem::create_directories(dir);
  struct Combo {
    Model model;
    PolicyKind policy;
    std::uint64_t seed;
  };
  const Combo combos[] = {{Model::M1, PolicyKind::Null, 3},         {Model::M2, PolicyKind::Null, 4},
                          {Model::M2, PolicyKind::ConsensusBoost, 5}, {Model::M3, PolicyKind::GreedyBest, 6},
                          {Model::M3, PolicyKind::ConsensusBoost, 7}};
  int identical = 0, replayed = 0, total = 0;
  std::vector<std::string> texts;
  for (const auto& c : combos) {
    const Scenario s = make_scenario(c.model, c.seed);
    const RunOptions opts{c.policy, Responder::Oracle};
    const std::string a = log_text(s, opts.policy, opts.responder, run_headless(s, opts).events);
    const std::string b = log_text(s, opts.policy, opts.responder, run_headless(s, opts).events);
    texts.push_back(a);
    ++total;
    identical += a == b;
  }
  for (std::uint64_t seed : {11, 12}) {
    const std::string a = random_trace_log(seed), b = random_trace_log(seed);
    texts.push_back(a);
    ++total;
    identical += a == b;
  }
  std::string first_failure;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto path = dir / fmt("log-%zu.jsonl", i);
    std::ofstream(path, std::ios::binary) << texts[i];
    const ReplayReport rep = replay_file(path);
    const bool ok = rep.events_identical && rep.metrics_identical;
    replayed += ok;
    if (!ok && first_failure.empty())
      first_failure = fmt("log %zu diverges at seq %llu", i, (unsigned long long)rep.first_mismatch_seq.value_or(0));
  }
  std::filesystem::remove_all(dir);
  o.pass = identical == total && replayed == total;
  o.detail = fmt("%d/%d byte-identical reruns, %d/%d exact replays", identical, total, replayed, total);
  if (!first_failure.empty()) o.detail += "; " + first_failure;
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
  double budget_seconds;  // 0 = no runtime requirement
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"clutter-exactness", clutter_exactness, 1.0},
      {"invariant-fuzz", invariant_fuzz, 120.0},
      {"model-separation", model_separation, 300.0},
      {"m3-requires-operator", m3_needs_operator, 0.0},
      {"decision-time-band", decision_time_band, 0.0},
      {"trial-protocol", trial_protocol, 0.0},
      {"determinism-replay", determinism_replay, 0.0},
  };
  const std::set<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.name)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = seconds_since(t0);
    std::string timing = fmt("%.2fs", secs);
    if (c.budget_seconds > 0.0) {
      timing += fmt(" of %.0fs budget", c.budget_seconds);
      if (secs >= c.budget_seconds) o.pass = false;
    }
    failures += !o.pass;
    std::printf("%s %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
