#include "hamflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hamflow/errors.hpp"

namespace hamflow {

void IntegratorConfig::validate() const {
  if (method == Method::rk4_fixed && !(step > 0.0)) {
    throw std::invalid_argument("integrator: step must be > 0");
  }
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("integrator: tolerances must be > 0");
  }
  if (max_steps < 1) throw std::invalid_argument("integrator: max_steps must be >= 1");
  if (!(max_horizon > 0.0)) throw std::invalid_argument("integrator: max_horizon must be > 0");
}

AmbientVector xi_field(const HolomorphicHamiltonian& H, const AmbientPoint& p) {
  const FormScale s = form_scale(H.model(), p);
  const HamiltonianJet j = H.jet(p, false);
  return {s.inverse * j.du, -s.inverse * j.dz};
}

CMatrix xi_jacobian(const HolomorphicHamiltonian& H, const AmbientPoint& p) {
  const int n = H.model().n;
  const FormScale s = form_scale(H.model(), p);
  const HamiltonianJet j = H.jet(p, true);
  CVector ds(2 * n);
  ds << s.d_inverse_dz, s.d_inverse_du;

  CMatrix d(2 * n, 2 * n);
  for (int r = 0; r < n; ++r) {
    for (int a = 0; a < 2 * n; ++a) {
      d(r, a) = ds(a) * j.du(r) + s.inverse * j.hessian(n + r, a);
      d(n + r, a) = -(ds(a) * j.dz(r) + s.inverse * j.hessian(r, a));
    }
  }
  return d;
}

Vector xi_real(const HolomorphicHamiltonian& H, const AmbientPoint& p) {
  const AmbientVector v = xi_field(H, p);
  CVector c(2 * H.model().n);
  c << v.dz, v.du;
  return to_real(c, H.model().n);
}

namespace {

// State vector: point in real layout (4n), then the 4n x 4n Jacobian column-major.
class AugmentedSystem {
 public:
  AugmentedSystem(const HolomorphicHamiltonian& H, bool with_jacobian)
      : H_(H), n_(H.model().n), with_jacobian_(with_jacobian) {}

  int size() const { return 4 * n_ + (with_jacobian_ ? 16 * n_ * n_ : 0); }
  bool with_jacobian() const { return with_jacobian_; }

  AmbientPoint point(const Vector& y, int chart) const {
    const CVector c = from_real(y.head(4 * n_), n_);
    return {chart, c.head(n_), c.tail(n_)};
  }

  Vector pack(const AmbientPoint& p, const Matrix* jac) const {
    Vector y(size());
    CVector c(2 * n_);
    c << p.z, p.u;
    y.head(4 * n_) = to_real(c, n_);
    if (with_jacobian_) {
      y.tail(16 * n_ * n_) = Eigen::Map<const Vector>(jac->data(), 16 * n_ * n_);
    }
    return y;
  }

  Matrix jacobian(const Vector& y) const {
    return Eigen::Map<const Matrix>(y.data() + 4 * n_, 4 * n_, 4 * n_);
  }

  Vector rhs(const Vector& y, int chart) const {
    const AmbientPoint p = point(y, chart);
    Vector dy(size());
    dy.head(4 * n_) = xi_real(H_, p);
    if (with_jacobian_) {
      const Matrix a = realify(xi_jacobian(H_, p), n_);
      const Matrix m = a * jacobian(y);
      dy.tail(16 * n_ * n_) = Eigen::Map<const Vector>(m.data(), 16 * n_ * n_);
    }
    return dy;
  }

  // Applies a chart switch in place when the sphere hysteresis rule asks for it.
  bool maybe_switch(Vector& y, int& chart) const {
    const ModelDescriptor& model = H_.model();
    const AmbientPoint p = point(y, chart);
    if (!should_switch_chart(model, p)) return false;
    const AmbientPoint q = to_chart(model, p, 1 - chart);
    Matrix jac;
    if (with_jacobian_) jac = realify(chart_transition_derivative(model, p), n_) * jacobian(y);
    y = pack(q, with_jacobian_ ? &jac : nullptr);
    chart = q.chart;
    return true;
  }

 private:
  const HolomorphicHamiltonian& H_;
  int n_;
  bool with_jacobian_;
};

bool all_finite(const Vector& v) { return v.allFinite(); }

[[noreturn]] void diverged(const std::string& why, double last_good) {
  throw FlowDivergence("flow diverged: " + why, last_good);
}

// Dormand-Prince 5(4) tableau.
namespace dp {
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

double error_norm(const Vector& err, const Vector& y0, const Vector& y1,
                  const IntegratorConfig& cfg) {
  double s = 0.0;
  for (int i = 0; i < err.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double r = err(i) / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(err.size()));
}

double initial_step(const AugmentedSystem& sys, const Vector& y, const Vector& f, int chart,
                    double direction, const IntegratorConfig& cfg) {
  Vector sc(y.size());
  for (int i = 0; i < y.size(); ++i) sc(i) = cfg.abs_tol + cfg.rel_tol * std::abs(y(i));
  const double d0 = std::sqrt((y.cwiseQuotient(sc)).squaredNorm() / y.size());
  const double d1 = std::sqrt((f.cwiseQuotient(sc)).squaredNorm() / y.size());
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  const Vector y1 = y + direction * h0 * f;
  const Vector f1 = sys.rhs(y1, chart);
  const double d2 = std::sqrt(((f1 - f).cwiseQuotient(sc)).squaredNorm() / y.size()) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min(100.0 * h0, h1);
}

FlowState integrate_rk45(const AugmentedSystem& sys, Vector y, int chart, double t,
                         const IntegratorConfig& cfg) {
  using namespace dp;
  const double dir = t >= 0.0 ? 1.0 : -1.0;
  const double span = std::abs(t);
  double done = 0.0;  // |time| reached
  long steps = 0;

  Vector k1 = sys.rhs(y, chart);
  double h = std::min(span, initial_step(sys, y, k1, chart, dir, cfg));
  bool last_rejected = false;

  while (done < span) {
    if (++steps > cfg.max_steps) diverged("step count exceeded", dir * done);
    const bool final_step = done + h >= span || span - (done + h) < 1e-12 * span;
    if (final_step) h = span - done;
    if (h < 1e-14 * std::max(1.0, span)) diverged("step size underflow", dir * done);
    const double hs = dir * h;

    Vector y_new, k7, err;
    try {
      const Vector k2 = sys.rhs(y + hs * a21 * k1, chart);
      const Vector k3 = sys.rhs(y + hs * (a31 * k1 + a32 * k2), chart);
      const Vector k4 = sys.rhs(y + hs * (a41 * k1 + a42 * k2 + a43 * k3), chart);
      const Vector k5 = sys.rhs(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), chart);
      const Vector k6 =
          sys.rhs(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), chart);
      y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = sys.rhs(y_new, chart);
      err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    } catch (const DomainError&) {
      // stage left the domain; retry smaller
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    const double e = all_finite(y_new) && all_finite(err) ? error_norm(err, y, y_new, cfg)
                                                          : std::numeric_limits<double>::infinity();
    if (e <= 1.0) {
      // done + (span - done) need not round to span
      done = final_step ? span : done + h;
      y = y_new;
      k1 = k7;
      if (sys.maybe_switch(y, chart)) k1 = sys.rhs(y, chart);
      double fac = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      last_rejected = false;
    } else {
      const double fac = std::isfinite(e) ? std::clamp(0.9 * std::pow(e, -0.2), 0.1, 0.9) : 0.25;
      h *= fac;
      last_rejected = true;
    }
  }

  FlowState s;
  s.point = sys.point(y, chart);
  if (sys.with_jacobian()) s.jacobian = sys.jacobian(y);
  s.time = t;
  s.steps = steps;
  return s;
}

FlowState integrate_rk4(const AugmentedSystem& sys, Vector y, int chart, double t,
                        const IntegratorConfig& cfg) {
  const long count = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t) / cfg.step - 1e-9)));
  if (count > cfg.max_steps) diverged("step count exceeded", 0.0);
  const double h = t / static_cast<double>(count);
  for (long i = 0; i < count; ++i) {
    const double tau = h * static_cast<double>(i);
    Vector y_new;
    try {
      const Vector k1 = sys.rhs(y, chart);
      const Vector k2 = sys.rhs(y + 0.5 * h * k1, chart);
      const Vector k3 = sys.rhs(y + 0.5 * h * k2, chart);
      const Vector k4 = sys.rhs(y + h * k3, chart);
      y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const DomainError& e) {
      diverged(e.what(), tau);
    }
    if (!all_finite(y_new)) diverged("non-finite state", tau);
    y = y_new;
    sys.maybe_switch(y, chart);
  }
  FlowState s;
  s.point = sys.point(y, chart);
  if (sys.with_jacobian()) s.jacobian = sys.jacobian(y);
  s.time = t;
  s.steps = count;
  return s;
}

}  // namespace

FlowState flow(const HolomorphicHamiltonian& H, const AmbientPoint& p0, double t,
               const IntegratorConfig& cfg, bool with_jacobian) {
  cfg.validate();
  if (!std::isfinite(t) || std::abs(t) > cfg.max_horizon) {
    throw std::invalid_argument("flow time outside the configured horizon");
  }
  const int n = H.model().n;
  if (p0.z.size() != n || p0.u.size() != n) {
    throw std::invalid_argument("ambient point dimension does not match model");
  }
  AugmentedSystem sys(H, with_jacobian);
  const Matrix eye = Matrix::Identity(4 * n, 4 * n);
  Vector y = sys.pack(p0, with_jacobian ? &eye : nullptr);
  int chart = p0.chart;

  try {
    // validates the starting point against the domain of Omega
    (void)form_scale(H.model(), p0);
  } catch (const DomainError& e) {
    diverged(e.what(), 0.0);
  }

  if (t == 0.0) {
    FlowState s;
    s.point = p0;
    if (with_jacobian) s.jacobian = eye;
    return s;
  }
  // Jacobian columns stay in the chart of p0; a switch here folds the
  // transition into the rows.
  sys.maybe_switch(y, chart);
  try {
    return cfg.method == Method::rk45_adaptive ? integrate_rk45(sys, y, chart, t, cfg)
                                               : integrate_rk4(sys, y, chart, t, cfg);
  } catch (const DomainError& e) {
    diverged(e.what(), 0.0);
  }
}

FlowState to_chart(const ModelDescriptor& model, const FlowState& s, int chart) {
  if (s.point.chart == chart || model.kind == ModelKind::flat) return s;
  FlowState r = s;
  r.point = to_chart(model, s.point, chart);
  if (s.jacobian) {
    r.jacobian = realify(chart_transition_derivative(model, s.point), model.n) * *s.jacobian;
  }
  return r;
}

double holomorphy_defect(const Matrix& jacobian) {
  const int dim = static_cast<int>(jacobian.rows());
  const Matrix i = complex_structure(dim / 2, dim / 4);
  return operator_norm(jacobian * i - i * jacobian);
}

double symplecticity_defect(const ModelDescriptor& model, const AmbientPoint& start,
                            const FlowState& end) {
  if (!end.jacobian) throw std::invalid_argument("flow state carries no Jacobian");
  const Matrix w0 = ambient_form_matrix(model, start).real();
  const Matrix w1 = ambient_form_matrix(model, end.point).real();
  const Matrix& j = *end.jacobian;
  return operator_norm(j.transpose() * w1 * j - w0);
}

}  // namespace hamflow
