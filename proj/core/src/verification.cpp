#include "hamflow/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace hamflow {

ResidualReport::ResidualReport(std::string name_, double tolerance_, bool diagnostic_)
    : name(std::move(name_)), tolerance(tolerance_), diagnostic(diagnostic_) {}

void ResidualReport::add(const SamplePoint& p, double residual) {
  if (!std::isfinite(residual)) residual = std::numeric_limits<double>::infinity();
  points.push_back(p);
  residuals.push_back(residual);
  max_residual = std::max(max_residual, residual);
  passed = max_residual <= tolerance;
}

void ResidualReport::merge(const ResidualReport& other) {
  for (std::size_t i = 0; i < other.points.size(); ++i) add(other.points[i], other.residuals[i]);
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].seed_id != points[b].seed_id) return points[a].seed_id < points[b].seed_id;
    return points[a].t < points[b].t;
  });
  std::vector<SamplePoint> p2;
  std::vector<double> r2;
  for (std::size_t i : order) {
    p2.push_back(points[i]);
    r2.push_back(residuals[i]);
  }
  points = std::move(p2);
  residuals = std::move(r2);
}

Vector hamilton_field(const Matrix& omega, const Vector& df) {
  return omega.transpose().fullPivLu().solve(df);
}

namespace {

// Complex differential (dh/dq, dh/dp) of h = H o iota at y.
CVector real_differential(const HolomorphicHamiltonian& H, const KahlerPoint& y) {
  const Partials p = eval_with_partials(H, embed(y));
  const int n = static_cast<int>(y.z.size());
  CVector g(2 * n);
  g.head(n) = p.dHdz + p.dHdu;
  g.tail(n) = kI * (p.dHdz - p.dHdu);
  return g;
}

Vector chart_velocity(const ModelDescriptor& model, const KahlerPoint& plus,
                      const KahlerPoint& minus, const KahlerPoint& at, double step) {
  const int n = model.n;
  const CVector zp = to_chart(model, plus, at.chart).z;
  const CVector zm = to_chart(model, minus, at.chart).z;
  return to_real(CVector((zp - zm) / (2.0 * step)), n);
}

}  // namespace

Vector generator_rhs(const HolomorphicHamiltonian& H, const KahlerPoint& y, const Matrix& Jt) {
  const Matrix w = omega_matrix(H.model(), y);
  const CVector dh = real_differential(H, y);
  return hamilton_field(w, dh.real()) + Jt * hamilton_field(w, dh.imag());
}

double generator_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                          const SolverConfig& cfg) {
  const LeafSolution sol = phi(H, x, t, cfg);
  const LeafSolution plus = phi(H, x, t + kTimeStep, cfg, sol.u_star);
  const LeafSolution minus = phi(H, x, t - kTimeStep, cfg, sol.u_star);
  const Vector lhs = chart_velocity(H.model(), plus.y, minus.y, sol.y, kTimeStep);
  return (lhs - generator_rhs(H, sol.y, j_t(sol, cfg.newton))).norm();
}

double cool_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                     const SolverConfig& cfg) {
  const LeafSolution sol = phi(H, x, t, cfg);
  const LeafSolution plus = phi(H, x, t + kTimeStep, cfg, sol.u_star);
  const LeafSolution minus = phi(H, x, t - kTimeStep, cfg, sol.u_star);
  const Vector lhs = chart_velocity(H.model(), plus.y, minus.y, sol.y, kTimeStep);
  const Vector xi = xi_real(H, sol.end.point);
  return (lhs - leaf_projection(sol, xi, cfg.newton)).norm();
}

double corollary_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                          const SolverConfig& cfg) {
  const ModelDescriptor& model = H.model();
  const MapWithJacobian fx = f_with_jacobian(H, x, t, cfg);
  const KahlerPoint plus = f(H, x, t + kTimeStep, cfg);
  const KahlerPoint minus = f(H, x, t - kTimeStep, cfg);
  const Vector lhs = chart_velocity(model, plus, minus, fx.y, kTimeStep);

  const Matrix wt = omega_t(H, fx.y, t, cfg);
  const Matrix inv_t = fx.jacobian.inverse().transpose();
  const CVector dh = real_differential(H, x);
  const Vector xi_re = hamilton_field(wt, inv_t * dh.real());
  const Vector xi_im = hamilton_field(wt, inv_t * dh.imag());
  const Matrix j0 = complex_structure(model.n, model.n);
  return (lhs - (xi_re + j0 * xi_im)).norm();
}

Matrix dphi_finite_difference(const HolomorphicHamiltonian& H, const LeafSolution& sol,
                              const SolverConfig& cfg, double step) {
  const ModelDescriptor& model = H.model();
  const int n = model.n;
  Matrix d(2 * n, 2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    const CVector dz = from_real(Vector(step * Vector::Unit(2 * n, k)), n);
    const KahlerPoint xp{sol.x.chart, sol.x.z + dz};
    const KahlerPoint xm{sol.x.chart, sol.x.z - dz};
    const KahlerPoint yp = phi(H, xp, sol.t, cfg, sol.u_star).y;
    const KahlerPoint ym = phi(H, xm, sol.t, cfg, sol.u_star).y;
    d.col(k) = chart_velocity(model, yp, ym, sol.y, step);
  }
  return d;
}

double holomorphy_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                           const SolverConfig& cfg) {
  const LeafSolution sol = phi(H, x, t, cfg);
  const Matrix jt = j_t(sol, cfg.newton);
  const Matrix d = dphi_finite_difference(H, sol, cfg);
  const int n = H.model().n;
  return operator_norm(jt * d - d * complex_structure(n, n));
}

double complex_structure_residual(const Matrix& Jt) {
  return operator_norm(Jt * Jt + Matrix::Identity(Jt.rows(), Jt.cols()));
}

double group_defect(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t, double s,
                    const SolverConfig& cfg) {
  const KahlerPoint direct = phi(H, x, t + s, cfg).y;
  const KahlerPoint mid = phi(H, x, s, cfg).y;
  const KahlerPoint composed = phi(H, mid, t, cfg).y;
  return chart_distance(H.model(), direct, composed);
}

double pullback_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                         const SolverConfig& cfg) {
  const MapWithJacobian fx = f_with_jacobian(H, x, t, cfg);
  const Matrix wt = omega_t(H, fx.y, t, cfg);
  const Matrix back = fx.jacobian.transpose() * wt * fx.jacobian;
  return operator_norm(omega_matrix(H.model(), x) - back);
}

// --- serialisation ---------------------------------------------------------

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const KahlerPoint& x) {
  nlohmann::json z = nlohmann::json::array();
  for (int j = 0; j < x.z.size(); ++j) z.push_back({x.z(j).real(), x.z(j).imag()});
  return {{"chart", x.chart}, {"z", z}};
}

nlohmann::json to_json(const ResidualReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& p = r.points[i];
    pts.push_back({{"seed_id", p.seed_id},
                   {"x", to_json(p.x)},
                   {"t", p.t},
                   {"residual", number_or_null(r.residuals[i])}});
  }
  return {{"name", r.name},
          {"tolerance", number_or_null(r.tolerance)},
          {"max_residual", number_or_null(r.max_residual)},
          {"passed", r.passed},
          {"diagnostic", r.diagnostic},
          {"points", pts}};
}

std::string to_csv(const std::vector<ResidualReport>& reports) {
  std::ostringstream os;
  int dim = 0;
  for (const auto& r : reports) {
    if (!r.points.empty()) dim = static_cast<int>(r.points.front().x.z.size());
  }
  os << "name,seed_id,chart";
  for (int j = 0; j < dim; ++j) os << ",re_x" << j << ",im_x" << j;
  os << ",t,residual\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& p = r.points[i];
      os << r.name << ',' << p.seed_id << ',' << p.x.chart;
      for (int j = 0; j < p.x.z.size(); ++j) {
        os << ',' << fmt17(p.x.z(j).real()) << ',' << fmt17(p.x.z(j).imag());
      }
      os << ',' << fmt17(p.t) << ',' << fmt17(r.residuals[i]) << '\n';
    }
  }
  return os.str();
}

}  // namespace hamflow
