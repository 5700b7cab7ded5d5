#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hubsim/headless.hpp"
#include "hubsim/metrics.hpp"
#include "hubsim/report.hpp"
#include "hubsim/session.hpp"

namespace py = pybind11;
using namespace hubsim;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; Python's json module does the rest.
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::handle& obj) {
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::list to_py_list(const std::vector<json>& items) {
  py::list out;
  for (const auto& j : items) out.append(to_py(j));
  return out;
}

py::list events_to_py(const std::vector<SessionEvent>& events) {
  py::list out;
  for (const auto& e : events) out.append(to_py(to_json(e)));
  return out;
}

Scenario scenario_arg(const py::handle& obj) {
  if (py::isinstance<py::str>(obj)) return load_scenario(obj.cast<std::string>());
  return scenario_from_json(from_py(obj));
}

py::dict run_trial(const py::handle& scenario, const std::string& policy, const std::string& responder,
                   std::optional<std::int64_t> max_ticks, bool events, bool report) {
  const Scenario s = scenario_arg(scenario);
  RunOptions opts{parse_policy(policy), parse_responder(responder)};
  if (max_ticks) opts.max_ticks = *max_ticks;
  HeadlessRun run;
  {
    py::gil_scoped_release release;
    run = run_headless(s, opts);
  }
  py::dict out;
  out["result"] = to_py(to_json(run.result));
  if (events) out["events"] = events_to_py(run.events);
  if (report) out["report"] = format_trial_report(run.result);
  return out;
}

py::dict run_batch(const py::handle& scenario, std::uint64_t seed_start, int seeds, const std::string& policy,
                   const std::string& responder) {
  const Scenario base = scenario_arg(scenario);
  const RunOptions opts{parse_policy(policy), parse_responder(responder)};
  std::vector<TrialResult> results;
  {
    py::gil_scoped_release release;
    for (int i = 0; i < seeds; ++i) {
      Scenario s = base;
      s.trial.seed = seed_start + static_cast<std::uint64_t>(i);
      results.push_back(run_headless(s, opts).result);
    }
  }
  py::dict out;
  out["batch"] = to_py(batch_json(results));
  out["report"] = format_batch_report(results);
  return out;
}

py::dict replay_log(const std::string& path) {
  const ReplayReport r = replay_file(path);
  py::dict out;
  out["events_identical"] = r.events_identical;
  out["metrics_identical"] = r.metrics_identical;
  out["first_mismatch_seq"] = r.first_mismatch_seq ? py::cast(*r.first_mismatch_seq) : py::none();
  out["events_replayed"] = r.events_replayed;
  out["result"] = to_py(to_json(r.result));
  return out;
}

void write_log(const std::string& path, const py::handle& scenario, const std::string& policy,
               const std::string& responder) {
  const Scenario s = scenario_arg(scenario);
  const RunOptions opts{parse_policy(policy), parse_responder(responder)};
  const HeadlessRun run = run_headless(s, opts);
  write_event_log(path, log_header(s, opts.policy, opts.responder), run.events);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-collective best-of-n decision simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<LogError>(m, "LogError", PyExc_RuntimeError);

  m.def(
      "make_scenario",
      [](const std::string& model, std::uint64_t seed, std::optional<std::string> difficulty) {
        std::optional<Difficulty> d;
        if (difficulty) d = parse_difficulty(*difficulty);
        return to_py(to_json(make_scenario(parse_model(model), seed, d)));
      },
      py::arg("model") = "M2", py::arg("seed") = 1, py::arg("difficulty") = py::none(),
      "Default scenario document for a model and seed.");
  m.def(
      "load_scenario", [](const std::string& path) { return to_py(to_json(load_scenario(path))); }, py::arg("path"));
  m.def(
      "validate_scenario", [](const py::handle& s) { return to_py(to_json(scenario_arg(s))); }, py::arg("scenario"),
      "Parses and validates a scenario dict or file path, returning the normalized document.");

  m.def("run", &run_trial, py::arg("scenario"), py::arg("policy") = "null", py::arg("responder") = "oracle",
        py::arg("max_ticks") = py::none(), py::arg("events") = false, py::arg("report") = false,
        "Runs one headless trial. Returns {'result', optionally 'events' and 'report'}.");
  m.def("batch", &run_batch, py::arg("scenario"), py::arg("seed_start") = 1, py::arg("seeds") = 10,
        py::arg("policy") = "null", py::arg("responder") = "oracle");
  m.def("write_log", &write_log, py::arg("path"), py::arg("scenario"), py::arg("policy") = "null",
        py::arg("responder") = "oracle", "Runs a trial and writes its event log.");
  m.def("replay", &replay_log, py::arg("path"));

  m.def(
      "global_clutter",
      [](int highlighted, int plain, int target_windows, int collective_windows, const std::string& mode) {
        return global_clutter(LayoutCounts{highlighted, plain, target_windows, collective_windows,
                                           parse_visualization(mode)});
      },
      py::arg("highlighted_targets"), py::arg("plain_targets"), py::arg("target_windows"),
      py::arg("collective_windows"), py::arg("mode") = "Collective", "Screen clutter in percent.");
  m.def("schedule_probes", &schedule_probes, py::arg("component_start"));

  py::class_<Engine>(m, "Engine")
      .def(py::init([](const py::handle& s) { return Engine(scenario_arg(s)); }), py::arg("scenario"))
      .def("step", [](Engine& e) { return events_to_py(e.step()); })
      .def("run", &Engine::run, py::arg("max_ticks") = INT64_MAX, py::call_guard<py::gil_scoped_release>())
      .def(
          "submit_command", [](Engine& e, const py::handle& cmd) { e.submit(command_from_json(from_py(cmd))); },
          py::arg("command"))
      .def(
          "submit_answer",
          [](Engine& e, int index, const py::handle& answer) {
            e.submit(ProbeAnswerInput{index, answer_from_json(from_py(answer))});
          },
          py::arg("index"), py::arg("answer"))
      .def(
          "snapshot", [](const Engine& e, bool entities) { return to_py(e.snapshot_json(entities)); },
          py::arg("include_entities") = false)
      .def("events", [](const Engine& e) { return events_to_py(e.events()); })
      .def("result",
           [](const Engine& e) {
             return to_py(to_json(compute_result(e.scenario(), PolicyKind::Human, Responder::None, e.events())));
           })
      .def_property_readonly("finished", &Engine::finished)
      .def_property_readonly("tick", &Engine::tick)
      .def_property_readonly("now", &Engine::now)
      .def_property_readonly("component", &Engine::component);

  py::class_<Session>(m, "Session")
      .def(py::init([](const py::handle& s, bool pause_on_disconnect, std::optional<std::string> log_path,
                       std::optional<std::string> result_path) {
             SessionOptions o;
             o.pause_on_disconnect = pause_on_disconnect;
             if (log_path) o.log_path = *log_path;
             if (result_path) o.result_path = *result_path;
             return std::make_unique<Session>(scenario_arg(s), o);
           }),
           py::arg("scenario"), py::arg("pause_on_disconnect") = true, py::arg("log_path") = py::none(),
           py::arg("result_path") = py::none())
      .def("connect", [](Session& s) { return to_py_list(s.connect()); })
      .def("disconnect", &Session::disconnect)
      .def(
          "handle", [](Session& s, const py::handle& msg) { return to_py_list(s.handle(from_py(msg))); },
          py::arg("message"))
      .def(
          "handle_line", [](Session& s, const std::string& line) { return to_py_list(s.handle_line(line)); },
          py::arg("line"))
      .def("tick", [](Session& s) { return to_py_list(s.tick()); })
      .def_property_readonly("running", &Session::running)
      .def_property_readonly("finished", &Session::finished)
      .def_property_readonly("connected", &Session::connected)
      .def_property_readonly("frame", &Session::frame);

  m.attr("PROTOCOL_VERSION") = kProtocolVersion;
}
