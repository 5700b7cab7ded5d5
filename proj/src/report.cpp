#include "hubsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

namespace hubsim {
namespace {

using Row = std::pair<std::string, std::optional<Summary>>;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void table(std::ostringstream& out, const std::string& title, const std::vector<Row>& rows) {
  out << title << '\n';
  char line[160];
  std::snprintf(line, sizeof line, "  %-10s %5s %18s %9s %9s %9s\n", "", "n", "mean (SD)", "median", "min", "max");
  out << line;
  for (const auto& [label, s] : rows) {
    if (!s) {
      std::snprintf(line, sizeof line, "  %-10s %5d %18s %9s %9s %9s\n", label.c_str(), 0, "-", "-", "-", "-");
    } else {
      const std::string ms = fmt(s->mean) + " (" + fmt(s->sd) + ")";
      std::snprintf(line, sizeof line, "  %-10s %5d %18s %9s %9s %9s\n", label.c_str(), s->n, ms.c_str(),
                    fmt(s->median).c_str(), fmt(s->min).c_str(), fmt(s->max).c_str());
    }
    out << line;
  }
  out << '\n';
}

std::vector<double> decision_values(const std::vector<DecisionRecord>& ds, std::optional<Difficulty> d,
                                    const std::function<double(const DecisionRecord&)>& f) {
  std::vector<double> v;
  for (const auto& r : ds)
    if (!d || r.difficulty == *d) v.push_back(f(r));
  return v;
}

std::vector<Row> by_difficulty(const std::vector<DecisionRecord>& ds,
                               const std::function<double(const DecisionRecord&)>& f) {
  return {{"Overall", summarize(decision_values(ds, std::nullopt, f))},
          {"Easy", summarize(decision_values(ds, Difficulty::Easy, f))},
          {"Hard", summarize(decision_values(ds, Difficulty::Hard, f))}};
}

double minutes(const DecisionRecord& d) { return d.duration_minutes(); }
double value(const DecisionRecord& d) { return d.selected_value; }
double success(const DecisionRecord& d) { return d.success() ? 100.0 : 0.0; }

template <typename F>
std::vector<double> collect(const std::vector<TrialResult>& rs, F f) {
  std::vector<double> v;
  for (const auto& r : rs)
    if (const std::optional<double> x = f(r)) v.push_back(*x);
  return v;
}

std::vector<Row> sa_rows(const std::vector<TrialResult>& rs) {
  return {{"SA_O", summarize(collect(rs, [](const TrialResult& r) { return r.overall.sa.overall; }))},
          {"SA1", summarize(collect(rs, [](const TrialResult& r) { return r.overall.sa.sa1; }))},
          {"SA2", summarize(collect(rs, [](const TrialResult& r) { return r.overall.sa.sa2; }))},
          {"SA3", summarize(collect(rs, [](const TrialResult& r) { return r.overall.sa.sa3; }))}};
}

void clutter_tables(std::ostringstream& out, const std::vector<ProbeClutter>& clutter) {
  if (clutter.empty()) return;
  for (const auto& [title, pick] :
       std::vector<std::pair<std::string, std::function<double(const ProbeClutter&)>>>{
           {"Global clutter (%) 15 s before probe", [](const ProbeClutter& c) { return c.before; }},
           {"Global clutter (%) while probe asked", [](const ProbeClutter& c) { return c.during_asking; }},
           {"Global clutter (%) during response", [](const ProbeClutter& c) { return c.during_response; }}}) {
    std::vector<Row> rows;
    for (const auto& [label, level] : std::vector<std::pair<std::string, std::optional<SALevel>>>{
             {"SA_O", std::nullopt}, {"SA1", SALevel::SA1}, {"SA2", SALevel::SA2}, {"SA3", SALevel::SA3}}) {
      std::vector<double> v;
      for (const auto& c : clutter)
        if (!level || c.level == *level) v.push_back(pick(c));
      rows.emplace_back(label, summarize(v));
    }
    table(out, title, rows);
  }
}

std::string header(const Scenario& s, std::size_t trials) {
  std::ostringstream out;
  out << "hubsim report\n";
  out << "  scenario: " << s.name << "  model: " << to_string(s.params.model)
      << "  visualization: " << to_string(s.visualization) << "  components:";
  for (auto d : s.components) out << ' ' << to_string(d);
  out << "\n  trials: " << trials << "\n\n";
  return out.str();
}

}  // namespace

std::optional<Summary> summarize(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  Summary s;
  s.n = static_cast<int>(v.size());
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / s.n;
  const std::size_t mid = v.size() / 2;
  s.median = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

std::string format_trial_report(const TrialResult& r) {
  std::ostringstream out;
  out << header(r.scenario, 1);
  out << "  seed: " << r.scenario.trial.seed << "  policy: " << to_string(r.policy)
      << "  sim time: " << fmt(r.sim_seconds) << " s  events: " << r.event_count << "\n\n";
  table(out, "Decision time (minutes)", by_difficulty(r.decisions, minutes));
  table(out, "Selected target value", by_difficulty(r.decisions, value));
  table(out, "Selection success rate (%)", by_difficulty(r.decisions, success));
  table(out, "SA probe accuracy (%)", sa_rows({r}));
  clutter_tables(out, r.clutter);

  const auto& i = r.interaction;
  out << "Interactions\n";
  out << "  commands: investigate " << i.investigate_commands << ", abandon " << i.abandon_commands << ", decide "
      << i.decide_commands << ", illegal " << i.illegal_commands << "\n";
  out << "  interventions: " << i.interventions << "\n";
  if (auto p = i.abandon_exceeded_pct()) out << "  abandon-exceeded (%): " << fmt(*p) << "\n";
  if (auto p = i.highest_value_abandoned_pct()) out << "  highest value target abandoned (%): " << fmt(*p) << "\n";
  if (auto p = i.collective_observation_pct()) out << "  collective observations (%): " << fmt(*p) << "\n";
  if (auto p = i.target_observation_pct()) out << "  target observations (%): " << fmt(*p) << "\n";
  if (auto m = r.overall.commit_to_decide_minutes) out << "  commit to decide (minutes): " << fmt(*m) << "\n";
  out << '\n';

  out << "Components\n";
  for (const auto& c : r.components)
    out << "  " << c.index << ": " << to_string(c.reason) << " after " << c.decisions << " decisions\n";
  return out.str();
}

std::string format_batch_report(const std::vector<TrialResult>& rs) {
  if (rs.empty()) return "hubsim report\n  no trials\n";
  std::ostringstream out;
  out << header(rs.front().scenario, rs.size());

  const auto per_trial = [&](std::optional<Difficulty> d, const std::function<double(const DecisionRecord&)>& f) {
    std::vector<double> v;
    for (const auto& r : rs) {
      const auto xs = decision_values(r.decisions, d, f);
      if (!xs.empty()) v.push_back(std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size()));
    }
    return summarize(v);
  };
  const auto rows = [&](const std::function<double(const DecisionRecord&)>& f) {
    return std::vector<Row>{{"Overall", per_trial(std::nullopt, f)},
                            {"Easy", per_trial(Difficulty::Easy, f)},
                            {"Hard", per_trial(Difficulty::Hard, f)}};
  };
  out << "Per-trial means\n\n";
  table(out, "Decision time (minutes)", rows(minutes));
  table(out, "Selected target value", rows(value));
  table(out, "Selection success rate (%)", rows(success));
  table(out, "SA probe accuracy (%)", sa_rows(rs));

  std::vector<DecisionRecord> all;
  for (const auto& r : rs) all.insert(all.end(), r.decisions.begin(), r.decisions.end());
  out << "Pooled decisions\n\n";
  table(out, "Decision time (minutes)", by_difficulty(all, minutes));
  table(out, "Selection success rate (%)", by_difficulty(all, success));

  std::vector<ProbeClutter> clutter;
  for (const auto& r : rs) clutter.insert(clutter.end(), r.clutter.begin(), r.clutter.end());
  clutter_tables(out, clutter);
  return out.str();
}

nlohmann::json batch_json(const std::vector<TrialResult>& rs) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& r : rs) {
    trials.push_back({{"seed", r.scenario.trial.seed},
                      {"overall", to_json(r.overall)},
                      {"easy", to_json(r.easy)},
                      {"hard", to_json(r.hard)},
                      {"interaction", to_json(r.interaction)}});
  }
  std::vector<DecisionRecord> all;
  for (const auto& r : rs) all.insert(all.end(), r.decisions.begin(), r.decisions.end());
  const auto pooled = [&](std::optional<Difficulty> d, const std::function<double(const DecisionRecord&)>& f) {
    const auto s = summarize(decision_values(all, d, f));
    if (!s) return nlohmann::json(nullptr);
    return nlohmann::json{{"n", s->n}, {"mean", s->mean}, {"sd", s->sd}, {"median", s->median}, {"min", s->min},
                          {"max", s->max}};
  };
  nlohmann::json aggregate;
  for (const auto& [name, d] : std::vector<std::pair<std::string, std::optional<Difficulty>>>{
           {"overall", std::nullopt}, {"easy", Difficulty::Easy}, {"hard", Difficulty::Hard}}) {
    aggregate[name] = {{"decision_time_minutes", pooled(d, minutes)},
                       {"selected_value", pooled(d, value)},
                       {"selection_success_pct", pooled(d, success)}};
  }
  return {{"trials", trials}, {"aggregate", aggregate}};
}

}  // namespace hubsim
