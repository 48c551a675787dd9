#include "runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <variant>

#include "hamflow/errors.hpp"
#include "hamflow/oracles.hpp"
#include "hamflow/verification.hpp"
#include "hamflow/version.hpp"

namespace hamflow::cli {

namespace {

struct ReportSpec {
  const char* name;
  double tolerance;
  bool diagnostic;
};

constexpr double kNoTolerance = std::numeric_limits<double>::infinity();

// Residual tolerances: difference-based identities at 1e-5, algebraic ones
// at 1e-8, oracle agreement at 1e-6.
const ReportSpec kLeaf{"leaf_residual", 0.0, false};
const ReportSpec kGenerator{"generator_residual", 1e-5, false};
const ReportSpec kCool{"cool_residual", 1e-5, false};
const ReportSpec kCorollary{"corollary_residual", 1e-5, false};
const ReportSpec kHolomorphy{"holomorphy_residual", 1e-5, false};
const ReportSpec kComplexStructure{"complex_structure_residual", 1e-8, false};
const ReportSpec kPullback{"pullback_residual", 1e-8, false};
const ReportSpec kOracle{"oracle_agreement", 1e-6, false};
const ReportSpec kJtOracle{"jt_oracle_agreement", 1e-6, false};
const ReportSpec kJtMinusJ0{"jt_minus_j0", 1e-6, false};
const ReportSpec kGroup{"group_defect", kNoTolerance, true};
const ReportSpec kCompat{"compatibility_min_eigenvalue", kNoTolerance, true};

struct Row {
  int seed_id = 0;
  double t = 0.0;
  KahlerPoint y;
  int newton_iters = 0;
  double residual = 0.0;
  bool degenerate = false;
};

struct Degeneracy {
  int seed_id = 0;
  double last_good_time = 0.0;
  double failed_time = 0.0;
  std::string message;
};

struct SeedOutcome {
  std::vector<Row> rows;
  std::map<std::string, ResidualReport> reports;
  std::optional<Degeneracy> degeneracy;
  int compatibility_flags = 0;

  void record(const ReportSpec& spec, const SamplePoint& p, double r) {
    auto it = reports.find(spec.name);
    if (it == reports.end()) {
      it = reports.emplace(spec.name, ResidualReport(spec.name, spec.tolerance, spec.diagnostic))
               .first;
    }
    it->second.add(p, r);
  }
};

// --- oracles ---------------------------------------------------------------

struct MobiusCase {
  Sl2Generator gen;
};
struct QuadraticCase {
  QuadraticSpec spec;
};
struct RealCase {};
using OracleCase = std::variant<MobiusCase, QuadraticCase, RealCase>;

std::optional<QuadraticSpec> as_quadratic(const PolynomialHamiltonian& h) {
  const ModelDescriptor& model = h.model();
  if (model.kind != ModelKind::flat || h.degree() > 2) return std::nullopt;
  const int n = model.n;
  QuadraticSpec q;
  q.n = n;
  q.A = CMatrix::Zero(2 * n, 2 * n);
  q.b = CVector::Zero(2 * n);
  for (const Term& t : h.terms()) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < t.alpha[j]; ++k) idx.push_back(j);
      for (int k = 0; k < t.beta[j]; ++k) idx.push_back(n + j);
    }
    if (idx.empty()) {
      q.c += t.coeff;
    } else if (idx.size() == 1) {
      q.b(idx[0]) += t.coeff;
    } else if (idx[0] == idx[1]) {
      q.A(idx[0], idx[0]) += 2.0 * t.coeff;
    } else {
      q.A(idx[0], idx[1]) += t.coeff;
      q.A(idx[1], idx[0]) += t.coeff;
    }
  }
  return q;
}

// h = c0 + sum c_k x_k, recovered by least squares on sample points.
std::optional<Sl2Generator> as_moment_combination(const PolynomialHamiltonian& h) {
  if (h.model().kind != ModelKind::sphere) return std::nullopt;
  const ModelDescriptor model = h.model();
  const int samples = 16;
  CMatrix basis(samples, 4);
  CVector values(samples);
  const PolynomialHamiltonian x[3] = {sphere_moment(1), sphere_moment(2), sphere_moment(3)};
  for (int s = 0; s < samples; ++s) {
    const KahlerPoint p = make_point(model, std::polar(0.2 + 0.15 * s, 0.9 * s));
    basis(s, 0) = 1.0;
    for (int k = 0; k < 3; ++k) basis(s, k + 1) = x[k](p);
    values(s) = h(p);
  }
  const CVector c = basis.colPivHouseholderQr().solve(values);
  const double misfit = (basis * c - values).cwiseAbs().maxCoeff();
  if (misfit > 1e-10 * (1.0 + values.cwiseAbs().maxCoeff())) return std::nullopt;
  return Sl2Generator::from_moment(c(1), c(2), c(3));
}

OracleCase pick_oracle(const PolynomialHamiltonian& h) {
  if (auto g = as_moment_combination(h)) return MobiusCase{*g};
  if (auto q = as_quadratic(h)) return QuadraticCase{*q};
  if (h.is_real(1e-12)) return RealCase{};
  throw ConfigError(
      "oracle-compare: no oracle covers this hamiltonian (need a quadratic on the flat model, a "
      "combination of sphere moment maps, or a real hamiltonian)");
}

std::string oracle_name(const OracleCase& c) {
  if (std::holds_alternative<MobiusCase>(c)) return "mobius";
  if (std::holds_alternative<QuadraticCase>(c)) return "quadratic";
  return "real_reference";
}

// --- per-seed work ---------------------------------------------------------

struct Context {
  const RunConfig& cfg;
  Job job;
  HolomorphicHamiltonian H;
  std::vector<double> times;
  std::optional<OracleCase> oracle;
};

void evaluate_point(const Context& ctx, const LeafSolution& sol, const SamplePoint& sp,
                    SeedOutcome& out, Row& row) {
  const auto& H = ctx.H;
  const auto& model = ctx.cfg.model;
  const SolverConfig& cfg = ctx.cfg.solver;
  const Matrix jt = j_t(sol, cfg.newton);
  const double compat = compatibility_min_eigenvalue(model, sol.y, jt);
  out.record(kCompat, sp, compat);
  if (!(compat > 0.0)) ++out.compatibility_flags;

  switch (ctx.job) {
    case Job::flow:
    case Job::sweep: {
      ReportSpec leaf = kLeaf;
      leaf.tolerance = cfg.newton.tol;
      out.record(leaf, sp, sol.residual);
      row.residual = sol.residual;
      break;
    }
    case Job::verify: {
      const double gen = generator_residual(H, sp.x, sp.t, cfg);
      out.record(kGenerator, sp, gen);
      out.record(kCool, sp, cool_residual(H, sp.x, sp.t, cfg));
      out.record(kCorollary, sp, corollary_residual(H, sp.x, sp.t, cfg));
      out.record(kHolomorphy, sp, holomorphy_residual(H, sp.x, sp.t, cfg));
      out.record(kComplexStructure, sp, complex_structure_residual(jt));
      out.record(kPullback, sp, pullback_residual(H, sp.x, sp.t, cfg));
      out.record(kGroup, sp, group_defect(H, sp.x, sp.t / 2, sp.t / 2, cfg));
      row.residual = gen;
      break;
    }
    case Job::oracle_compare: {
      double agreement = 0.0;
      if (const auto* m = std::get_if<MobiusCase>(&*ctx.oracle)) {
        const KahlerPoint ref = oracle_mobius(m->gen, sp.x, sp.t);
        agreement = chart_distance(model, sol.y, ref);
        out.record(kJtMinusJ0, sp, operator_norm(jt - complex_structure(1, 1)));
      } else if (const auto* q = std::get_if<QuadraticCase>(&*ctx.oracle)) {
        const QuadraticResult ref = oracle_quadratic(q->spec, sp.x.z, sp.t);
        agreement = (sol.y.z - ref.y).norm();
        out.record(kJtOracle, sp, operator_norm(jt - ref.Jt));
      } else {
        const KahlerPoint ref = real_reference(ctx.cfg.hamiltonian, sp.x, sp.t);
        agreement = chart_distance(model, sol.y, ref);
      }
      out.record(kOracle, sp, agreement);
      row.residual = agreement;
      break;
    }
  }
}

SeedOutcome run_seed(const Context& ctx, int seed_id) {
  SeedOutcome out;
  const KahlerPoint& x = ctx.cfg.seeds[seed_id];
  std::optional<CVector> warm;
  double last_good = 0.0;
  bool any_good = false;
  for (double t : ctx.times) {
    try {
      const LeafSolution sol = phi(ctx.H, x, t, ctx.cfg.solver, warm);
      Row row{seed_id, t, sol.y, sol.newton_iters, 0.0, false};
      evaluate_point(ctx, sol, SamplePoint{seed_id, x, t}, out, row);
      out.rows.push_back(row);
      warm = sol.u_star;
      last_good = t;
      any_good = true;
    } catch (const LeafDegeneracy& e) {
      out.degeneracy = Degeneracy{seed_id, any_good ? last_good : 0.0, t, e.what()};
    } catch (const FlowDivergence& e) {
      out.degeneracy = Degeneracy{seed_id, any_good ? last_good : 0.0, t, e.what()};
    } catch (const DomainError& e) {
      out.degeneracy = Degeneracy{seed_id, any_good ? last_good : 0.0, t, e.what()};
    }
    if (out.degeneracy) {
      Row bad{seed_id, t, out.rows.empty() ? x : out.rows.back().y, 0,
              std::numeric_limits<double>::quiet_NaN(), true};
      out.rows.push_back(bad);
      break;
    }
  }
  return out;
}

// --- output ----------------------------------------------------------------

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectories_csv(const std::vector<Row>& rows, int n) {
  std::ostringstream os;
  os << "seed_id,t,chart";
  for (int j = 0; j < n; ++j) os << ",re_y" << j << ",im_y" << j;
  os << ",newton_iters,residual,status\n";
  for (const Row& r : rows) {
    os << r.seed_id << ',' << fmt17(r.t) << ',' << r.y.chart;
    for (int j = 0; j < n; ++j) {
      if (r.degenerate) {
        os << ",nan,nan";
      } else {
        os << ',' << fmt17(r.y.z(j).real()) << ',' << fmt17(r.y.z(j).imag());
      }
    }
    os << ',' << r.newton_iters << ',' << fmt17(r.residual) << ','
       << (r.degenerate ? "degenerate" : "ok") << '\n';
  }
  return os.str();
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

}  // namespace

RunResult run(const RunConfig& cfg, const RunOptions& opts) {
  Context ctx{cfg, opts.job, extend(cfg.hamiltonian), cfg.times(), std::nullopt};
  if (opts.job == Job::oracle_compare) ctx.oracle = pick_oracle(cfg.hamiltonian);

  std::vector<int> ids;
  if (opts.seed_id) {
    if (*opts.seed_id < 0 || *opts.seed_id >= static_cast<int>(cfg.seeds.size())) {
      throw ConfigError("--seed-id: out of range (config has " +
                        std::to_string(cfg.seeds.size()) + " seeds)");
    }
    ids.push_back(*opts.seed_id);
  } else {
    for (int i = 0; i < static_cast<int>(cfg.seeds.size()); ++i) ids.push_back(i);
  }

  std::vector<SeedOutcome> outcomes(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) outcomes[i] = run_seed(ctx, ids[i]);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, ids.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Deterministic merge in seed order.
  std::vector<Row> rows;
  std::vector<std::string> order;
  std::map<std::string, ResidualReport> merged;
  nlohmann::json degeneracies = nlohmann::json::array();
  int compat_flags = 0;
  for (const SeedOutcome& o : outcomes) {
    rows.insert(rows.end(), o.rows.begin(), o.rows.end());
    for (const auto& [name, rep] : o.reports) {
      auto it = merged.find(name);
      if (it == merged.end()) {
        order.push_back(name);
        merged.emplace(name, rep);
      } else {
        it->second.merge(rep);
      }
    }
    compat_flags += o.compatibility_flags;
    if (o.degeneracy) {
      degeneracies.push_back({{"seed_id", o.degeneracy->seed_id},
                              {"last_good_time", o.degeneracy->last_good_time},
                              {"failed_time", o.degeneracy->failed_time},
                              {"message", o.degeneracy->message}});
    }
  }
  std::sort(order.begin(), order.end());

  nlohmann::json reports = nlohmann::json::array();
  nlohmann::json diag_reports = nlohmann::json::array();
  std::vector<ResidualReport> all;
  bool all_pass = true;
  for (const auto& name : order) {
    const ResidualReport& r = merged.at(name);
    all.push_back(r);
    if (r.diagnostic) {
      diag_reports.push_back(to_json(r));
    } else {
      reports.push_back(to_json(r));
      all_pass = all_pass && r.passed;
    }
  }

  RunResult result;
  const bool degenerate = !degeneracies.empty();
  if (degenerate && opts.job != Job::sweep) {
    result.exit_code = kDegenerate;
  } else {
    result.exit_code = all_pass ? kPass : kReportFailed;
  }

  const std::map<Job, std::string> residual_column = {{Job::flow, kLeaf.name},
                                                      {Job::sweep, kLeaf.name},
                                                      {Job::verify, kGenerator.name},
                                                      {Job::oracle_compare, kOracle.name}};
  nlohmann::json diagnostics = {{"reports", diag_reports},
                                {"degeneracies", degeneracies},
                                {"compatibility_nonpositive_points", compat_flags}};
  if (ctx.oracle) diagnostics["oracle"] = oracle_name(*ctx.oracle);
  if (opts.job == Job::sweep) {
    nlohmann::json interval = nlohmann::json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto& o = outcomes[i];
      interval.push_back({{"seed_id", ids[i]},
                          {"last_good_time", o.degeneracy ? o.degeneracy->last_good_time
                                                          : ctx.times.back()},
                          {"reached_t_max", !o.degeneracy}});
    }
    diagnostics["interval"] = interval;
  }

  nlohmann::json echo = cfg.raw;
  echo["job"] = job_name(opts.job);
  result.report = {{"job", job_name(opts.job)},
                   {"exit_code", result.exit_code},
                   {"trajectory_residual", residual_column.at(opts.job)},
                   {"reports", reports},
                   {"diagnostics", diagnostics},
                   {"config", echo},
                   {"versions", build_versions()}};
  result.trajectories_csv = trajectories_csv(rows, cfg.model.n);
  result.residuals_csv = to_csv(all);
  return result;
}

void write_outputs(const RunResult& result, const std::string& prefix) {
  const std::string header = "# generated " + timestamp() + "\n";
  write_file(prefix + ".trajectories.csv", header + result.trajectories_csv);
  write_file(prefix + ".residuals.csv", header + result.residuals_csv);
  write_file(prefix + ".report.json", result.report.dump(2) + "\n");
}

}  // namespace hamflow::cli
