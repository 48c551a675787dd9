#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace hamflow::cli {

enum ExitCode : int { kPass = 0, kConfigError = 1, kDegenerate = 2, kReportFailed = 3 };

struct RunOptions {
  Job job = Job::flow;
  unsigned threads = 1;
  std::optional<int> seed_id;
};

struct RunResult {
  int exit_code = kPass;
  nlohmann::json report;
  /// Rows only; the timestamp header is added when writing.
  std::string trajectories_csv;
  std::string residuals_csv;
};

/// Runs a job over all seeds. Config problems found at run time (e.g. no
/// oracle for oracle-compare) throw ConfigError.
RunResult run(const RunConfig& cfg, const RunOptions& opts);

/// Writes <prefix>.trajectories.csv, <prefix>.residuals.csv and <prefix>.report.json.
void write_outputs(const RunResult& result, const std::string& prefix);

}  // namespace hamflow::cli
