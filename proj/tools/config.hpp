#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hamflow/leaf.hpp"

namespace hamflow::cli {

enum class Job { flow, verify, oracle_compare, sweep };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ModelDescriptor model;
  PolynomialHamiltonian hamiltonian;
  std::vector<KahlerPoint> seeds;
  double t_max = 0.0;
  int steps = 1;
  SolverConfig solver;
  Job job = Job::flow;
  std::string output = "hamflow";
  nlohmann::json raw;

  /// t_max * k / steps for k = 0..steps.
  std::vector<double> times() const;
};

Job parse_job(const std::string& name);
std::string job_name(Job job);

/// Parses and validates a config document. Every failure is a ConfigError
/// whose message starts with the offending field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

}  // namespace hamflow::cli
