#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hubsim/headless.hpp"
#include "hubsim/report.hpp"
#include "hubsim/session.hpp"

namespace fs = std::filesystem;
using namespace hubsim;

namespace {

std::atomic<bool> g_stop{false};

struct ScenarioArgs {
  std::string file;
  std::string model{"M2"};
  std::uint64_t seed{1};
  std::string difficulty;
  std::string visualization;
  bool seed_given() const { return seed_opt != nullptr && seed_opt->count() > 0; }
  CLI::Option* seed_opt{nullptr};
};

void add_scenario_options(CLI::App* app, ScenarioArgs& a) {
  auto* file = app->add_option("-s,--scenario", a.file, "Scenario JSON file")->check(CLI::ExistingFile);
  app->add_option("-m,--model", a.model, "Collective model when no scenario file is given (M1, M2, M3)")
      ->excludes(file);
  a.seed_opt = app->add_option("--seed", a.seed, "Trial seed (overrides the scenario file)");
  app->add_option("-d,--difficulty", a.difficulty, "Run every component at this difficulty (easy, hard)");
  app->add_option("--visualization", a.visualization, "IA or Collective");
}

Scenario build_scenario(const ScenarioArgs& a) {
  Scenario s;
  if (!a.file.empty()) {
    s = load_scenario(a.file);
    if (a.seed_given()) s.trial.seed = a.seed;
    if (!a.difficulty.empty()) {
      const Difficulty d = parse_difficulty(a.difficulty);
      for (auto& c : s.components) c = d;
      s.trial.difficulty = d;
    }
  } else {
    std::optional<Difficulty> d;
    if (!a.difficulty.empty()) d = parse_difficulty(a.difficulty);
    s = make_scenario(parse_model(a.model), a.seed, d);
  }
  if (!a.visualization.empty()) s.visualization = parse_visualization(a.visualization);
  s.validate();
  return s;
}

std::string stem(const Scenario& s) { return s.name + "-seed" + std::to_string(s.trial.seed); }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hubsim: multi-collective best-of-n decision simulator"};
  app.require_subcommand(1);
  std::string out_dir = default_output_dir().string();
  app.add_option("-o,--out", out_dir, "Output directory (default: $HUBSIM_OUTPUT_DIR or ./hubsim-out)");

  // run
  ScenarioArgs run_args;
  std::string run_policy = "null", run_responder = "oracle";
  bool run_quiet = false;
  auto* run = app.add_subcommand("run", "Run one headless trial and write its event log and metrics");
  add_scenario_options(run, run_args);
  run->add_option("-p,--policy", run_policy, "Scripted operator: null, greedy-best, consensus-boost");
  run->add_option("-r,--responder", run_responder, "SA probe responder: none, oracle");
  run->add_flag("-q,--quiet", run_quiet, "Do not print the report");

  // batch
  ScenarioArgs batch_args;
  std::string batch_policy = "null", batch_responder = "oracle";
  std::uint64_t seed_start = 1;
  int seed_count = 10;
  bool batch_logs = false;
  auto* batch = app.add_subcommand("batch", "Run a seed range and write an aggregate report");
  add_scenario_options(batch, batch_args);
  batch->add_option("-p,--policy", batch_policy, "Scripted operator: null, greedy-best, consensus-boost");
  batch->add_option("-r,--responder", batch_responder, "SA probe responder: none, oracle");
  batch->add_option("--seed-start", seed_start, "First seed");
  batch->add_option("-n,--seeds", seed_count, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  batch->add_flag("--logs", batch_logs, "Also write one event log per seed");

  // serve
  ScenarioArgs serve_args;
  int port = 7878;
  double speed = 1.0;
  bool keep_running = false;
  auto* serve_cmd = app.add_subcommand("serve", "Host one live operator session over TCP");
  add_scenario_options(serve_cmd, serve_args);
  serve_cmd->add_option("--port", port, "TCP port on 127.0.0.1 (0 picks a free port)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--speed", speed, "Real-time multiplier; 0 runs unpaced")->check(CLI::NonNegativeNumber);
  serve_cmd->add_flag("--keep-running", keep_running, "Keep simulating while no operator is connected");

  // replay
  std::string log_path;
  bool replay_json = false;
  auto* replay_cmd = app.add_subcommand("replay", "Re-simulate an event log and verify every metric");
  replay_cmd->add_option("log", log_path, "Event log (.jsonl)")->required()->check(CLI::ExistingFile);
  replay_cmd->add_flag("--json", replay_json, "Print the recomputed metrics as JSON");

  // scenario
  ScenarioArgs show_args;
  auto* show = app.add_subcommand("scenario", "Print the resolved scenario as JSON");
  add_scenario_options(show, show_args);

  CLI11_PARSE(app, argc, argv);
  const fs::path out{out_dir};

  try {
    if (*run) {
      const Scenario s = build_scenario(run_args);
      RunOptions opts{parse_policy(run_policy), parse_responder(run_responder)};
      const HeadlessRun r = run_headless(s, opts);
      const fs::path base = out / stem(s);
      write_event_log(base.string() + ".events.jsonl", log_header(s, opts.policy, opts.responder), r.events);
      write_text(base.string() + ".result.json", to_json(r.result).dump(2) + "\n");
      const std::string report = format_trial_report(r.result);
      write_text(base.string() + ".report.txt", report);
      if (!run_quiet) std::cout << report;
      std::cerr << "wrote " << base.string() << ".{events.jsonl,result.json,report.txt}\n";
      return 0;
    }

    if (*batch) {
      const Scenario base = build_scenario(batch_args);
      RunOptions opts{parse_policy(batch_policy), parse_responder(batch_responder)};
      std::vector<TrialResult> results;
      for (int i = 0; i < seed_count; ++i) {
        Scenario s = base;
        s.trial.seed = seed_start + static_cast<std::uint64_t>(i);
        HeadlessRun r = run_headless(s, opts);
        if (batch_logs)
          write_event_log(out / (stem(s) + ".events.jsonl"), log_header(s, opts.policy, opts.responder), r.events);
        std::cerr << "seed " << s.trial.seed << ": " << r.result.decisions.size() << " decisions\n";
        results.push_back(std::move(r.result));
      }
      const std::string name = base.name + "-batch";
      write_text(out / (name + ".json"), batch_json(results).dump(2) + "\n");
      const std::string report = format_batch_report(results);
      write_text(out / (name + ".report.txt"), report);
      std::cout << report;
      return 0;
    }

    if (*serve_cmd) {
      const Scenario s = build_scenario(serve_args);
      SessionOptions so;
      so.pause_on_disconnect = !keep_running;
      so.log_path = out / (stem(s) + ".session.events.jsonl");
      so.result_path = out / (stem(s) + ".session.result.json");
      Session session(s, so);
      std::signal(SIGINT, [](int) { g_stop = true; });
      std::signal(SIGTERM, [](int) { g_stop = true; });
      serve(session, static_cast<std::uint16_t>(port), speed, g_stop, [](std::uint16_t p) {
        std::cerr << "listening on 127.0.0.1:" << p << '\n';
      });
      std::cerr << (session.finished() ? "trial complete; " : "session stopped; ") << "log at "
                << so.log_path->string() << '\n';
      return 0;
    }

    if (*replay_cmd) {
      const ReplayReport r = replay_file(log_path);
      if (replay_json) {
        std::cout << to_json(r.result).dump(2) << '\n';
      } else {
        std::cout << format_trial_report(r.result);
        std::cout << "\nreplay: " << r.events_replayed << " events regenerated\n";
      }
      std::cerr << "events identical: " << (r.events_identical ? "yes" : "no");
      if (r.first_mismatch_seq) std::cerr << " (first mismatch at seq " << *r.first_mismatch_seq << ")";
      std::cerr << "\nmetrics identical: " << (r.metrics_identical ? "yes" : "no") << '\n';
      return r.events_identical && r.metrics_identical ? 0 : 1;
    }

    if (*show) {
      std::cout << to_json(build_scenario(show_args)).dump(2) << '\n';
      return 0;
    }
  } catch (const LogError& e) {
    std::cerr << "log error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
