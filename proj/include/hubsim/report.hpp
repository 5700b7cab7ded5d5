#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hubsim/headless.hpp"

namespace hubsim {

struct Summary {
  int n{0};
  double mean{0.0};
  double sd{0.0};  // sample standard deviation; 0 when n < 2
  double median{0.0};
  double min{0.0};
  double max{0.0};
};

std::optional<Summary> summarize(std::vector<double> values);

// Plain-text tables of mean (SD), median, min, and max by decision
// difficulty and SA level. Per-decision rows for one trial.
std::string format_trial_report(const TrialResult& result);

// Aggregate over many trials: each trial contributes its per-trial mean.
std::string format_batch_report(const std::vector<TrialResult>& results);

nlohmann::json batch_json(const std::vector<TrialResult>& results);

}  // namespace hubsim
