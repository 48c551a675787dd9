#include "hamflow/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "hamflow/errors.hpp"

namespace hamflow {

namespace {

void check_dimension(const ModelDescriptor& model, const CVector& z) {
  if (z.size() != model.n) {
    throw std::invalid_argument("point dimension does not match model");
  }
}

cplx sphere_denominator(const AmbientPoint& p) {
  const cplx d = 1.0 + p.z(0) * p.u(0);
  if (std::abs(d) <= kSphereGuardBand) {
    throw DomainError("ambient point on the sphere antidiagonal (1 + z u = 0)");
  }
  return d;
}

// Complex tangent vector (dz, du) of X from its real 4n layout.
CVector ambient_tangent(const Vector& a, int n) { return from_real(a, n); }

}  // namespace

ModelDescriptor ModelDescriptor::flat(int n) {
  if (n < 1) throw std::invalid_argument("flat model needs n >= 1");
  return {ModelKind::flat, n};
}

ModelDescriptor ModelDescriptor::sphere() { return {ModelKind::sphere, 1}; }

KahlerPoint make_point(const ModelDescriptor& model, cplx z, int chart) {
  CVector v = CVector::Zero(model.n);
  v(0) = z;
  return make_point(model, v, chart);
}

KahlerPoint make_point(const ModelDescriptor& model, const CVector& z, int chart) {
  check_dimension(model, z);
  if (chart < 0 || chart >= model.chart_count()) {
    throw std::invalid_argument("chart index out of range");
  }
  return {chart, z};
}

AmbientPoint embed(const KahlerPoint& x) { return {x.chart, x.z, x.z.conjugate()}; }

AmbientPoint involution(const AmbientPoint& p) {
  return {p.chart, p.u.conjugate(), p.z.conjugate()};
}

KahlerPoint project_pi0(const AmbientPoint& p) { return {p.chart, p.z}; }

bool on_real_locus(const AmbientPoint& p, double tol) {
  return (p.u - p.z.conjugate()).norm() <= tol;
}

CMatrix holomorphic_form(const ModelDescriptor& model, const AmbientPoint& p) {
  const int n = model.n;
  if (model.kind == ModelKind::flat) {
    return CMatrix::Identity(n, n) * cplx(0.0, 0.5);
  }
  const cplx d = sphere_denominator(p);
  CMatrix w(1, 1);
  w(0, 0) = cplx(0.0, 2.0) / (d * d);
  return w;
}

FormScale form_scale(const ModelDescriptor& model, const AmbientPoint& p) {
  const int n = model.n;
  if (model.kind == ModelKind::flat) {
    return {cplx(0.0, -2.0), CVector::Zero(n), CVector::Zero(n)};
  }
  // Omega = 2i/D^2 dz^du with D = 1 + z u, so 1/s = -i D^2 / 2.
  const cplx d = sphere_denominator(p);
  FormScale s;
  s.inverse = -kI * d * d / 2.0;
  s.d_inverse_dz = CVector::Constant(1, -kI * d * p.u(0));
  s.d_inverse_du = CVector::Constant(1, -kI * d * p.z(0));
  return s;
}

CMatrix ambient_form_matrix(const ModelDescriptor& model, const AmbientPoint& p) {
  const int n = model.n;
  const CMatrix coeff = holomorphic_form(model, p);
  const int dim = 4 * n;
  CMatrix f(dim, dim);
  for (int a = 0; a < dim; ++a) {
    const CVector va = ambient_tangent(Vector::Unit(dim, a), n);
    for (int b = 0; b < dim; ++b) {
      const CVector vb = ambient_tangent(Vector::Unit(dim, b), n);
      cplx s = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          s += coeff(j, k) * (va(j) * vb(n + k) - vb(j) * va(n + k));
        }
      }
      f(a, b) = s;
    }
  }
  return f;
}

Matrix omega_matrix(const ModelDescriptor& model, const KahlerPoint& x) {
  const int n = model.n;
  double scale = 1.0;
  if (model.kind == ModelKind::sphere) {
    const double r2 = std::norm(x.z(0));
    scale = 4.0 / ((1.0 + r2) * (1.0 + r2));
  }
  Matrix w = Matrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    w(j, n + j) = scale;
    w(n + j, j) = -scale;
  }
  return w;
}

SymplecticData kahler_forms(const ModelDescriptor& model, const KahlerPoint& x) {
  check_dimension(model, x.z);
  return {omega_matrix(model, x), complex_structure(model.n, model.n),
          holomorphic_form(model, embed(x))};
}

Matrix real_lift(int n) {
  Matrix l(4 * n, 2 * n);
  l.topRows(2 * n) = Matrix::Identity(2 * n, 2 * n);
  l.bottomRows(2 * n) = conjugation(n, n);
  return l;
}

KahlerPoint to_chart(const ModelDescriptor& model, const KahlerPoint& x, int chart) {
  if (model.kind == ModelKind::flat || x.chart == chart) return x;
  if (x.z(0) == 0.0) throw DomainError("point is the pole of the target chart");
  return {chart, x.z.cwiseInverse()};
}

AmbientPoint to_chart(const ModelDescriptor& model, const AmbientPoint& p, int chart) {
  if (model.kind == ModelKind::flat || p.chart == chart) return p;
  if (p.z(0) == 0.0 || p.u(0) == 0.0) {
    throw DomainError("ambient point is on a pole of the target chart");
  }
  return {chart, p.z.cwiseInverse(), p.u.cwiseInverse()};
}

CMatrix chart_transition_derivative(const ModelDescriptor& model, const AmbientPoint& p) {
  const int n = model.n;
  if (model.kind == ModelKind::flat) return CMatrix::Identity(2 * n, 2 * n);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = -1.0 / (p.z(0) * p.z(0));
  d(1, 1) = -1.0 / (p.u(0) * p.u(0));
  return d;
}

Matrix chart_transition_derivative(const ModelDescriptor& model, const KahlerPoint& x) {
  const int n = model.n;
  if (model.kind == ModelKind::flat) return Matrix::Identity(2 * n, 2 * n);
  CMatrix d(1, 1);
  d(0, 0) = -1.0 / (x.z(0) * x.z(0));
  return realify(d, 1);
}

KahlerPoint normalize_chart(const ModelDescriptor& model, const KahlerPoint& x) {
  if (model.kind == ModelKind::flat) return x;
  if (std::abs(x.z(0)) > 1.0 + kChartHysteresis) return to_chart(model, x, 1 - x.chart);
  return x;
}

bool should_switch_chart(const ModelDescriptor& model, const AmbientPoint& p) {
  if (model.kind == ModelKind::flat) return false;
  const double az = std::abs(p.z(0)), au = std::abs(p.u(0));
  const double here = std::max(az, au);
  if (here <= 1.0 + kChartHysteresis) return false;
  if (az == 0.0 || au == 0.0) return false;
  const double there = std::max(1.0 / az, 1.0 / au);
  return there < here;
}

double chart_distance(const ModelDescriptor& model, const KahlerPoint& a, const KahlerPoint& b) {
  return (a.z - to_chart(model, b, a.chart).z).norm();
}

}  // namespace hamflow
