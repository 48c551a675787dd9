#include <cstdio>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "config.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  using namespace hamflow::cli;

  CLI::App app{"hamflow: complex-time hamiltonian flows on Kähler manifolds"};
  std::string job_arg;
  std::string config_path;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  int seed_id = -1;
  app.add_option("job", job_arg, "flow | verify | oracle-compare | sweep")->required();
  app.add_option("--config", config_path, "JSON run config")->required();
  app.add_option("--jobs", threads, "worker threads (default: logical cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed-id", seed_id, "run a single seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    RunOptions opts;
    opts.job = parse_job(job_arg);
    opts.threads = threads;
    if (seed_id >= 0) opts.seed_id = seed_id;
    const RunConfig cfg = load_config(config_path);
    const RunResult result = run(cfg, opts);
    write_outputs(result, cfg.output);

    const auto& degens = result.report["diagnostics"]["degeneracies"];
    for (const auto& r : result.report["reports"]) {
      std::printf("%-28s max %.3e  tol %.1e  %s\n", r["name"].get<std::string>().c_str(),
                  r["max_residual"].is_null() ? INFINITY : r["max_residual"].get<double>(),
                  r["tolerance"].get<double>(), r["passed"].get<bool>() ? "pass" : "FAIL");
    }
    for (const auto& d : degens) {
      std::fprintf(stderr, "seed %d degenerate at t = %.6g (last good t = %.6g): %s\n",
                   d["seed_id"].get<int>(), d["failed_time"].get<double>(),
                   d["last_good_time"].get<double>(), d["message"].get<std::string>().c_str());
    }
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
