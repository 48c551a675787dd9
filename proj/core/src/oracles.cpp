#include "hamflow/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "hamflow/errors.hpp"

namespace hamflow {

CMatrix expm(const CMatrix& a) { return a.exp(); }

// --- quadratic -------------------------------------------------------------

void QuadraticSpec::validate() const {
  if (n < 1) throw std::invalid_argument("quadratic: n must be >= 1");
  if (A.rows() != 2 * n || A.cols() != 2 * n || b.size() != 2 * n) {
    throw std::invalid_argument("quadratic: A must be 2n x 2n and b of length 2n");
  }
  if ((A - A.transpose()).norm() > 1e-14 * std::max(1.0, A.norm())) {
    throw std::invalid_argument("quadratic: A must be symmetric");
  }
}

PolynomialHamiltonian QuadraticSpec::to_hamiltonian() const {
  validate();
  const auto model = ModelDescriptor::flat(n);
  auto exps = [this](int a, int b) {
    std::vector<int> alpha(n, 0), beta(n, 0);
    for (int i : {a, b}) {
      if (i < 0) continue;
      if (i < n) ++alpha[i];
      else ++beta[i - n];
    }
    return std::pair{alpha, beta};
  };
  std::vector<Term> terms;
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = 0; b < 2 * n; ++b) {
      auto [al, be] = exps(a, b);
      terms.push_back(Term{0.5 * A(a, b), al, be, 0});
    }
    auto [al, be] = exps(a, -1);
    terms.push_back(Term{b(a), al, be, 0});
  }
  terms.push_back(Term{c, std::vector<int>(n, 0), std::vector<int>(n, 0), 0});
  return PolynomialHamiltonian(model, std::move(terms));
}

namespace {

// Real 2n x 2n matrix of the R-linear map eta -> P eta - conj(Q eta), acting on
// (Re eta, Im eta).
Matrix real_linear(const CMatrix& p, const CMatrix& q) {
  const int n = static_cast<int>(p.cols());
  Matrix m(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    for (int part = 0; part < 2; ++part) {
      CVector eta = CVector::Zero(n);
      eta(j) = part == 0 ? cplx(1.0) : kI;
      const CVector out = p * eta - (q * eta).conjugate();
      m.col(part * n + j) << out.real(), out.imag();
    }
  }
  return m;
}

CVector solve_real_linear(const Matrix& m, const CVector& rhs) {
  const int n = static_cast<int>(rhs.size());
  Vector r(2 * n);
  r << rhs.real(), rhs.imag();
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-12 * s(0)) {
    throw LeafDegeneracy("quadratic oracle: transported leaf tangent to M (caustic)", 0.0, 0.0);
  }
  const Vector x = m.fullPivLu().solve(r);
  CVector out(n);
  for (int j = 0; j < n; ++j) out(j) = cplx(x(j), x(n + j));
  return out;
}

}  // namespace

QuadraticResult oracle_quadratic(const QuadraticSpec& spec, const CVector& x, double t) {
  spec.validate();
  const int n = spec.n;
  const int m = 2 * n;

  // Omega = (i/2) sum dz_j^du_j as a 2n x 2n antisymmetric matrix on (z, u);
  // the Hamilton field V solves Omega^T V = grad H.
  CMatrix omega = CMatrix::Zero(m, m);
  omega.topRightCorner(n, n) = cplx(0.0, 0.5) * CMatrix::Identity(n, n);
  omega.bottomLeftCorner(n, n) = cplx(0.0, -0.5) * CMatrix::Identity(n, n);
  const CMatrix k = omega.transpose().inverse();

  // Affine generator on (w, 1).
  CMatrix s = CMatrix::Zero(m + 1, m + 1);
  s.topLeftCorner(m, m) = k * spec.A;
  s.topRightCorner(m, 1) = k * spec.b;
  const CMatrix e = expm(t * s);

  const CMatrix pzz = e.block(0, 0, n, n), pzu = e.block(0, n, n, n);
  const CMatrix puz = e.block(n, 0, n, n), puu = e.block(n, n, n, n);
  const CVector pz = e.block(0, m, n, 1), pu = e.block(n, m, n, 1);

  // U = conj(Z) on the leaf (x, u): P_uu u - conj(P_zu u) = conj(P_zz x + p_z) - P_uz x - p_u
  const Matrix op = real_linear(puu, pzu);
  const CVector rhs = (pzz * x + pz).conjugate() - puz * x - pu;
  const CVector u = solve_real_linear(op, rhs);
  const CVector y = pzz * x + pzu * u + pz;

  // J_t v = w where i (v, conj v) = (w, conj w) + (P_zu eta, P_uu eta):
  // eliminating w gives P_uu eta - conj(P_zu eta) = 2i conj(v).
  Matrix jt(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    for (int part = 0; part < 2; ++part) {
      CVector v = CVector::Zero(n);
      v(j) = part == 0 ? cplx(1.0) : kI;
      const CVector eta = solve_real_linear(op, 2.0 * kI * v.conjugate());
      const CVector w = kI * v - pzu * eta;
      jt.col(part * n + j) << w.real(), w.imag();
    }
  }
  return {y, jt};
}

// --- Möbius ----------------------------------------------------------------

Sl2Generator Sl2Generator::from_moment(cplx c1, cplx c2, cplx c3) {
  Eigen::Matrix2cd z1, z2, z3;
  // dz/dt for x1: -i(1 - z^2)/2, for x2: (1 + z^2)/2, for x3: i z
  z1 << 0.0, cplx(0.0, -0.5), cplx(0.0, -0.5), 0.0;
  z2 << 0.0, 0.5, -0.5, 0.0;
  z3 << cplx(0.0, 0.5), 0.0, 0.0, cplx(0.0, -0.5);
  return {c1 * z1 + c2 * z2 + c3 * z3};
}

void Sl2Generator::validate() const {
  if (std::abs(zeta.trace()) > 1e-14 * std::max(1.0, zeta.norm())) {
    throw std::invalid_argument("sl2 generator must be traceless");
  }
}

KahlerPoint oracle_mobius(const Sl2Generator& gen, const KahlerPoint& x, double t) {
  gen.validate();
  const auto model = ModelDescriptor::sphere();
  const CMatrix e = expm(CMatrix(t * gen.zeta));
  const cplx a = e(0, 0), b = e(0, 1), c = e(1, 0), d = e(1, 1);

  auto apply = [&](const KahlerPoint& p) -> std::optional<KahlerPoint> {
    const cplx z = p.z(0);
    // chart 1 coordinates w = 1/z see the conjugated matrix (d c; b a)
    const cplx num = p.chart == 0 ? a * z + b : d * z + c;
    const cplx den = p.chart == 0 ? c * z + d : b * z + a;
    if (std::abs(den) <= 1e-12 * std::max(1.0, std::abs(num))) return std::nullopt;
    return make_point(model, num / den, p.chart);
  };

  if (auto y = apply(x)) return normalize_chart(model, *y);
  if (auto y = apply(to_chart(model, x, 1 - x.chart))) return normalize_chart(model, *y);
  throw DomainError("Möbius oracle: image is a pole in both charts");
}

// --- real Hamilton flow ----------------------------------------------------

KahlerPoint real_reference(const PolynomialHamiltonian& h, const KahlerPoint& x, double t,
                           double tol) {
  if (!h.is_real(1e-12)) throw std::invalid_argument("real_reference needs a real hamiltonian");
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  const ModelDescriptor model = h.model();
  const int n = model.n;
  // Sphere trajectories may pass a pole, so integrate in short pieces and
  // move to the better chart between them.
  const int pieces = model.kind == ModelKind::sphere ? std::max(1, int(std::ceil(std::abs(t) / 0.02))) : 1;

  KahlerPoint y = x;
  double done = 0.0;
  for (int k = 1; k <= pieces && t != 0.0; ++k) {
    const double next = t * k / pieces;
    const PolynomialHamiltonian hc = h.in_chart(y.chart);
    const int chart = y.chart;
    auto field = [&](const State& s, State& ds, double) {
      KahlerPoint p{chart, CVector(n)};
      for (int j = 0; j < n; ++j) p.z(j) = cplx(s[j], s[n + j]);
      const Matrix w = omega_matrix(model, p);
      const CVector dh = hc.real_gradient(p);
      // omega(Xi, .) = dh  <=>  W^T Xi = dh
      const Vector xi = w.transpose().fullPivLu().solve(Vector(dh.real()));
      for (int i = 0; i < 2 * n; ++i) ds[i] = xi(i);
    };
    State s(2 * n);
    for (int j = 0; j < n; ++j) {
      s[j] = y.z(j).real();
      s[n + j] = y.z(j).imag();
    }
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
    const double span = next - done;
    const double dt0 = (span > 0 ? 1.0 : -1.0) * std::min(1e-3, std::abs(span));
    odeint::integrate_adaptive(stepper, field, s, done, next, dt0);
    for (int j = 0; j < n; ++j) y.z(j) = cplx(s[j], s[n + j]);
    if (!y.z.allFinite()) throw FlowDivergence("real reference flow diverged", done);
    y = normalize_chart(model, y);
    done = next;
  }
  return y;
}

}  // namespace hamflow
