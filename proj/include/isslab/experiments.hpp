// Named, reproducible experiments wiring the workbench modules together.
// Each experiment consumes a Config (seed, grid/horizon overrides, params),
// produces named pass/fail checks, a results table and a summary. The CLI
// runs one experiment per invocation; the acceptance suite runs the pinned
// defaults of the criteria experiments.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isslab/config.hpp"

namespace isslab {

struct ExperimentCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<ExperimentCheck> checks;
  std::vector<std::string> csv_header;
  std::vector<std::vector<double>> csv_rows;
  std::string summary;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  std::optional<std::string> first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return c.name;
    return std::nullopt;
  }
};

struct ExperimentEntry {
  std::string name;
  std::string description;
  std::function<ExperimentResult(const Config&)> run;
};

// Stable-ordered registry.
const std::vector<ExperimentEntry>& experiment_registry();
const ExperimentEntry* find_experiment(const std::string& name);

// Executes one experiment: writes manifest.txt, results.csv and summary.txt
// under out_dir (if non-empty), prints the summary to log.
// Exit status: 0 all checks pass, 1 first failing check named, 2 usage or
// config errors.
int run_experiment_config(const Config& cfg, const std::string& out_dir,
                          std::string* log_out = nullptr);

}  // namespace isslab
