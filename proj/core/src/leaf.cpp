#include "hamflow/leaf.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hamflow/errors.hpp"

namespace hamflow {

void NewtonConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("newton: tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("newton: max_iters must be >= 1");
  if (max_halvings < 0) throw std::invalid_argument("newton: max_halvings must be >= 0");
}

namespace {

// One evaluation of G(u) with its real Jacobian dG/d(Re u, Im u).
struct LeafResidual {
  FlowState end;
  Vector g;
  Matrix dg;
};

class LeafProblem {
 public:
  LeafProblem(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
              const SolverConfig& cfg)
      : H_(H), x_(x), t_(t), cfg_(cfg), n_(H.model().n) {}

  LeafResidual evaluate(const CVector& u) {
    const AmbientPoint start{x_.chart, x_.z, u};
    FlowState end = flow(H_, start, t_, cfg_.integrator, true);
    if (!target_chart_) target_chart_ = end.point.chart;
    end = to_chart(H_.model(), end, *target_chart_);

    const CVector g = end.point.u - end.point.z.conjugate();
    const Matrix& m = *end.jacobian;
    const Matrix c = conjugation(n_, n_);
    const int k = 2 * n_;
    Matrix dg = m.block(k, k, k, k) - c * m.block(0, k, k, k);
    return {std::move(end), to_real(g, n_), std::move(dg)};
  }

  int n() const { return n_; }

 private:
  const HolomorphicHamiltonian& H_;
  KahlerPoint x_;
  double t_;
  const SolverConfig& cfg_;
  int n_;
  std::optional<int> target_chart_;
};

LeafSolution finish(const ModelDescriptor& model, const KahlerPoint& x, double t,
                    const CVector& u, LeafResidual&& r, int iters) {
  LeafSolution s;
  s.x = x;
  s.t = t;
  s.u_star = u;
  s.newton_iters = iters;
  s.residual = r.g.norm();
  const KahlerPoint y = normalize_chart(model, project_pi0(r.end.point));
  s.end = to_chart(model, r.end, y.chart);
  s.y = project_pi0(s.end.point);
  return s;
}

LeafSolution newton_solve(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                          const SolverConfig& cfg, CVector u) {
  const NewtonConfig& nc = cfg.newton;
  LeafProblem prob(H, x, t, cfg);
  LeafResidual cur = prob.evaluate(u);
  int iters = 0;
  while (cur.g.norm() > nc.tol) {
    if (iters >= nc.max_iters) {
      std::ostringstream os;
      os << "leaf intersection: Newton did not converge in " << nc.max_iters
         << " iterations (residual " << cur.g.norm() << ")";
      throw LeafDegeneracy(os.str(), 0.0, cur.g.norm());
    }
    if (condition_number(cur.dg) > nc.max_condition) {
      throw LeafDegeneracy("leaf intersection: transported leaf is tangent to M", 0.0,
                           cur.g.norm());
    }
    const Vector step = cur.dg.fullPivLu().solve(-cur.g);
    const CVector du = from_real(step, prob.n());

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= nc.max_halvings; ++h, lambda *= 0.5) {
      const CVector trial = u + lambda * du;
      try {
        LeafResidual next = prob.evaluate(trial);
        if (next.g.norm() < cur.g.norm()) {
          u = trial;
          cur = std::move(next);
          accepted = true;
          break;
        }
      } catch (const FlowDivergence&) {
      } catch (const DomainError&) {
      }
    }
    ++iters;
    if (!accepted) {
      throw LeafDegeneracy("leaf intersection: damped Newton made no progress", 0.0,
                           cur.g.norm());
    }
  }
  return finish(H.model(), x, t, u, std::move(cur), iters);
}

[[noreturn]] void rethrow_with_time(double last_good) {
  try {
    throw;
  } catch (const LeafDegeneracy& e) {
    throw LeafDegeneracy(e.what(), last_good, e.residual());
  } catch (const FlowDivergence& e) {
    throw LeafDegeneracy(e.what(), last_good, std::numeric_limits<double>::infinity());
  }
}

// Continuation from a converged solution at `from.t` to time t in `pieces`
// equal sub-steps, with linear extrapolation of u.
LeafSolution continue_to(const HolomorphicHamiltonian& H, const LeafSolution& from, double t,
                         const SolverConfig& cfg, int pieces) {
  LeafSolution prev = from;
  std::optional<CVector> older;
  double older_t = 0.0;
  for (int k = 1; k <= pieces; ++k) {
    const double tk = from.t + (t - from.t) * static_cast<double>(k) / pieces;
    CVector guess = prev.u_star;
    if (older) guess += (prev.u_star - *older) * ((tk - prev.t) / (prev.t - older_t));
    try {
      LeafSolution next = newton_solve(H, from.x, tk, cfg, guess);
      older = prev.u_star;
      older_t = prev.t;
      prev = std::move(next);
    } catch (...) {
      rethrow_with_time(prev.t);
    }
  }
  return prev;
}

LeafSolution trivial_solution(const HolomorphicHamiltonian& H, const KahlerPoint& x) {
  LeafSolution s;
  s.x = x;
  s.t = 0.0;
  s.u_star = x.z.conjugate();
  s.y = x;
  s.end.point = embed(x);
  s.end.jacobian = Matrix::Identity(4 * H.model().n, 4 * H.model().n);
  return s;
}

}  // namespace

LeafSolution phi(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                 const SolverConfig& cfg, const std::optional<CVector>& warm_start) {
  cfg.newton.validate();
  if (t == 0.0 && !warm_start) return trivial_solution(H, x);
  const CVector guess = warm_start ? *warm_start : CVector(x.z.conjugate());
  try {
    return newton_solve(H, x, t, cfg, guess);
  } catch (const LeafDegeneracy&) {
    if (warm_start) rethrow_with_time(0.0);
  } catch (const FlowDivergence&) {
    if (warm_start) rethrow_with_time(0.0);
  }
  // Direct solve from the t = 0 anchor failed: continuation in t.
  const LeafSolution origin = trivial_solution(H, x);
  for (int pieces : {2, 4, 8, 16}) {
    try {
      return continue_to(H, origin, t, cfg, pieces);
    } catch (const LeafDegeneracy&) {
      if (pieces == 16) throw;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<LeafSolution> phi_path(const HolomorphicHamiltonian& H, const KahlerPoint& x,
                                   const std::vector<double>& times, const SolverConfig& cfg) {
  std::vector<LeafSolution> out;
  out.reserve(times.size());
  LeafSolution prev = trivial_solution(H, x);
  std::optional<LeafSolution> older;
  for (double t : times) {
    if (t == prev.t) {
      out.push_back(prev);
      continue;
    }
    CVector guess = prev.u_star;
    if (older && older->t != prev.t) {
      guess += (prev.u_star - older->u_star) * ((t - prev.t) / (prev.t - older->t));
    }
    LeafSolution next;
    try {
      next = newton_solve(H, x, t, cfg, guess);
    } catch (const LeafDegeneracy&) {
      next = continue_to(H, prev, t, cfg, 4);
    } catch (const FlowDivergence&) {
      next = continue_to(H, prev, t, cfg, 4);
    }
    older = prev;
    prev = next;
    out.push_back(std::move(next));
  }
  return out;
}

KahlerPoint pi_t(const HolomorphicHamiltonian& H, const AmbientPoint& p, double t,
                 const SolverConfig& cfg) {
  if (t == 0.0) return normalize_chart(H.model(), project_pi0(p));
  const FlowState back = flow(H, p, -t, cfg.integrator, false);
  const KahlerPoint label = normalize_chart(H.model(), project_pi0(back.point));
  return phi(H, label, t, cfg).y;
}

Matrix leaf_projection(const LeafSolution& sol, const Matrix& v, const NewtonConfig& newton) {
  const int n = static_cast<int>(sol.x.z.size());
  const Matrix& m = *sol.end.jacobian;
  Matrix split(4 * n, 4 * n);
  split << real_lift(n), m.middleCols(2 * n, 2 * n);
  if (condition_number(split) > newton.max_condition) {
    throw LeafDegeneracy("transported leaf is tangent to M: splitting is singular", sol.t,
                         sol.residual);
  }
  const Matrix coeffs = split.fullPivLu().solve(v);
  return coeffs.topRows(2 * n);
}

Matrix j_t(const LeafSolution& sol, const NewtonConfig& newton) {
  const int n = static_cast<int>(sol.x.z.size());
  const Matrix rhs = complex_structure(2 * n, n) * real_lift(n);
  return leaf_projection(sol, rhs, newton);
}

Matrix j_t(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
           const SolverConfig& cfg) {
  return j_t(phi(H, x, t, cfg), cfg.newton);
}

Matrix dphi(const LeafSolution& sol) {
  const int n = static_cast<int>(sol.x.z.size());
  const int k = 2 * n;
  const Matrix& m = *sol.end.jacobian;
  const Matrix c = conjugation(n, n);
  const Matrix dg_u = m.block(k, k, k, k) - c * m.block(0, k, k, k);
  const Matrix dg_x = m.block(k, 0, k, k) - c * m.block(0, 0, k, k);
  const Matrix du_dx = -dg_u.fullPivLu().solve(dg_x);
  return m.block(0, 0, k, k) + m.block(0, k, k, k) * du_dx;
}

FrameData frame(const HolomorphicHamiltonian& H, const LeafSolution& sol,
                const SolverConfig& cfg) {
  return {j_t(sol, cfg.newton), dphi(sol), omega_t(H, sol.y, sol.t, cfg)};
}

KahlerPoint f(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
              const SolverConfig& cfg) {
  const FlowState s = flow(H, embed(x), t, cfg.integrator, false);
  return normalize_chart(H.model(), project_pi0(s.point));
}

MapWithJacobian f_with_jacobian(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                                const SolverConfig& cfg, std::optional<int> chart) {
  const ModelDescriptor& model = H.model();
  const int n = model.n;
  FlowState s = flow(H, embed(x), t, cfg.integrator, true);
  const int target = chart ? *chart : normalize_chart(model, project_pi0(s.point)).chart;
  s = to_chart(model, s, target);
  return {project_pi0(s.point), s.jacobian->topRows(2 * n) * real_lift(n)};
}

KahlerPoint f_inverse(const HolomorphicHamiltonian& H, const KahlerPoint& y, double t,
                      const SolverConfig& cfg, const std::optional<KahlerPoint>& guess) {
  const ModelDescriptor& model = H.model();
  const NewtonConfig& nc = cfg.newton;
  const int n = model.n;
  KahlerPoint x = guess ? *guess : f(H, y, -t, cfg);

  auto residual = [&](const KahlerPoint& p) {
    MapWithJacobian m = f_with_jacobian(H, p, t, cfg, y.chart);
    return std::pair{to_real(CVector(m.y.z - y.z), n), std::move(m.jacobian)};
  };

  auto [r, jac] = residual(x);
  int iters = 0;
  while (r.norm() > nc.tol) {
    if (iters++ >= nc.max_iters) {
      throw LeafDegeneracy("f_t inversion: Newton did not converge", 0.0, r.norm());
    }
    if (condition_number(jac) > nc.max_condition) {
      throw LeafDegeneracy("f_t inversion: singular derivative", 0.0, r.norm());
    }
    const CVector dx = from_real(Vector(jac.fullPivLu().solve(-r)), n);
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= nc.max_halvings; ++h, lambda *= 0.5) {
      const KahlerPoint trial{x.chart, x.z + lambda * dx};
      try {
        auto [r2, j2] = residual(trial);
        if (r2.norm() < r.norm()) {
          x = trial;
          r = std::move(r2);
          jac = std::move(j2);
          accepted = true;
          break;
        }
      } catch (const FlowDivergence&) {
      } catch (const DomainError&) {
      }
    }
    if (!accepted) throw LeafDegeneracy("f_t inversion: no progress", 0.0, r.norm());
  }
  return normalize_chart(model, x);
}

Matrix omega_t(const HolomorphicHamiltonian& H, const KahlerPoint& y, double t,
               const SolverConfig& cfg) {
  const ModelDescriptor& model = H.model();
  if (t == 0.0) return omega_matrix(model, y);
  const KahlerPoint x = f_inverse(H, y, t, cfg);
  const MapWithJacobian m = f_with_jacobian(H, x, t, cfg, y.chart);
  const Matrix inv = m.jacobian.inverse();
  return inv.transpose() * omega_matrix(model, x) * inv;
}

double compatibility_min_eigenvalue(const ModelDescriptor& model, const KahlerPoint& y,
                                    const Matrix& Jt) {
  const Matrix s = omega_matrix(model, y) * Jt;
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace hamflow
