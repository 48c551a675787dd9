#include "hamflow/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "hamflow/errors.hpp"

namespace hamflow {

namespace {

cplx ipow(cplx x, int k) {
  if (k == 0) return 1.0;
  cplx r = 1.0;
  const int m = k < 0 ? -k : k;
  for (int i = 0; i < m; ++i) r *= x;
  return k < 0 ? 1.0 / r : r;
}

// Product over all variables of w_b^(e_b), skipping up to two indices.
cplx partial_product(const CVector& w, const std::vector<int>& e, int skip1, int skip2) {
  cplx r = 1.0;
  for (int b = 0; b < w.size(); ++b) {
    if (b == skip1 || b == skip2) continue;
    r *= ipow(w(b), e[b]);
  }
  return r;
}

std::vector<int> exponents(const Term& t) {
  std::vector<int> e(t.alpha);
  e.insert(e.end(), t.beta.begin(), t.beta.end());
  return e;
}

// Evaluates sum_k c_k w^e_k D^-k_k with w = (z, u), D = 1 + z.u, and its
// first and (optionally) second holomorphic partials.
HamiltonianJet eval_terms(const std::vector<Term>& terms, const CVector& z, const CVector& u,
                          bool with_hessian) {
  const int n = static_cast<int>(z.size());
  const int m = 2 * n;
  CVector w(m);
  w << z, u;

  HamiltonianJet jet{0.0, CVector::Zero(n), CVector::Zero(n),
                     with_hessian ? CMatrix::Zero(m, m) : CMatrix()};
  CVector grad = CVector::Zero(m);

  const cplx d = 1.0 + (z.array() * u.array()).sum();
  // dD/dw_a and d2D/dw_a dw_b
  CVector dd(m);
  dd << u, z;
  auto dd2 = [n](int a, int b) { return (a - b == n || b - a == n) ? 1.0 : 0.0; };

  for (const Term& t : terms) {
    const std::vector<int> e = exponents(t);
    const int k = t.denom_pow;
    const cplx p = partial_product(w, e, -1, -1);

    cplx q = 1.0, q1 = 0.0, q2 = 0.0;  // D^-k, -k D^(-k-1), k(k+1) D^(-k-2)
    if (k != 0) {
      if (std::abs(d) <= kSphereGuardBand) throw DomainError("1 + z u vanishes in hamiltonian");
      q = ipow(d, -k);
      q1 = -static_cast<double>(k) * ipow(d, -k - 1);
      q2 = static_cast<double>(k) * (k + 1) * ipow(d, -k - 2);
    }

    jet.value += t.coeff * p * q;

    CVector pa = CVector::Zero(m);
    for (int a = 0; a < m; ++a) {
      if (e[a] == 0) continue;
      pa(a) = static_cast<double>(e[a]) * ipow(w(a), e[a] - 1) * partial_product(w, e, a, -1);
    }
    for (int a = 0; a < m; ++a) {
      grad(a) += t.coeff * (pa(a) * q + p * q1 * dd(a));
    }

    if (!with_hessian) continue;
    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) {
        cplx pab = 0.0;
        if (a == b) {
          if (e[a] != 0 && e[a] != 1) {
            pab = static_cast<double>(e[a]) * (e[a] - 1) * ipow(w(a), e[a] - 2) *
                  partial_product(w, e, a, -1);
          }
        } else if (e[a] != 0 && e[b] != 0) {
          pab = static_cast<double>(e[a]) * e[b] * ipow(w(a), e[a] - 1) * ipow(w(b), e[b] - 1) *
                partial_product(w, e, a, b);
        }
        const cplx qab = q2 * dd(a) * dd(b) + q1 * dd2(a, b);
        const cplx v = t.coeff * (pab * q + pa(a) * q1 * dd(b) + pa(b) * q1 * dd(a) + p * qab);
        jet.hessian(a, b) += v;
        if (a != b) jet.hessian(b, a) += v;
      }
    }
  }
  jet.dz = grad.head(n);
  jet.du = grad.tail(n);
  return jet;
}

Term transition(const Term& t) {
  Term r = t;
  for (auto& a : r.alpha) a = t.denom_pow - a;
  for (auto& b : r.beta) b = t.denom_pow - b;
  return r;
}

void check_term(const ModelDescriptor& model, const Term& t) {
  if (static_cast<int>(t.alpha.size()) != model.n || static_cast<int>(t.beta.size()) != model.n) {
    throw std::invalid_argument("term multi-index length does not match model dimension");
  }
  if (model.kind == ModelKind::flat && t.denom_pow != 0) {
    throw std::invalid_argument("flat model terms cannot carry a (1 + |z|^2) denominator");
  }
  if (t.denom_pow < 0) throw std::invalid_argument("denominator power must be >= 0");
  if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag())) {
    throw std::invalid_argument("term coefficient must be finite");
  }
}

}  // namespace

PolynomialHamiltonian::PolynomialHamiltonian(ModelDescriptor model, std::vector<Term> terms,
                                             int chart)
    : model_(model), chart_(chart), terms_(std::move(terms)) {
  if (chart < 0 || chart >= model.chart_count()) throw std::invalid_argument("bad chart index");
  for (const Term& t : terms_) check_term(model_, t);
  canonicalize();
}

PolynomialHamiltonian PolynomialHamiltonian::constant(ModelDescriptor model, cplx c) {
  return monomial(model, c, std::vector<int>(model.n, 0), std::vector<int>(model.n, 0), 0);
}

PolynomialHamiltonian PolynomialHamiltonian::monomial(ModelDescriptor model, cplx c,
                                                      std::vector<int> alpha,
                                                      std::vector<int> beta, int denom_pow) {
  return PolynomialHamiltonian(model, {Term{c, std::move(alpha), std::move(beta), denom_pow}});
}

void PolynomialHamiltonian::canonicalize() {
  std::map<std::tuple<std::vector<int>, std::vector<int>, int>, cplx> merged;
  for (const Term& t : terms_) merged[{t.alpha, t.beta, t.denom_pow}] += t.coeff;
  terms_.clear();
  for (const auto& [key, c] : merged) {
    if (c == 0.0) continue;
    terms_.push_back(Term{c, std::get<0>(key), std::get<1>(key), std::get<2>(key)});
  }
}

PolynomialHamiltonian PolynomialHamiltonian::in_chart(int chart) const {
  if (chart == chart_ || model_.kind == ModelKind::flat) return *this;
  std::vector<Term> moved;
  moved.reserve(terms_.size());
  for (const Term& t : terms_) moved.push_back(transition(t));
  PolynomialHamiltonian r;
  r.model_ = model_;
  r.chart_ = chart;
  r.terms_ = std::move(moved);
  r.canonicalize();
  return r;
}

cplx PolynomialHamiltonian::operator()(const KahlerPoint& x) const {
  const auto& ts = x.chart == chart_ ? terms_ : in_chart(x.chart).terms_;
  return eval_terms(ts, x.z, x.z.conjugate(), false).value;
}

CVector PolynomialHamiltonian::real_gradient(const KahlerPoint& x) const {
  const auto& ts = x.chart == chart_ ? terms_ : in_chart(x.chart).terms_;
  const HamiltonianJet j = eval_terms(ts, x.z, x.z.conjugate(), false);
  const int n = model_.n;
  CVector g(2 * n);
  g.head(n) = j.dz + j.du;
  g.tail(n) = kI * (j.dz - j.du);
  return g;
}

PolynomialHamiltonian PolynomialHamiltonian::conj() const {
  std::vector<Term> ts;
  for (const Term& t : terms_) ts.push_back(Term{std::conj(t.coeff), t.beta, t.alpha, t.denom_pow});
  return PolynomialHamiltonian(model_, std::move(ts), chart_);
}

bool PolynomialHamiltonian::is_real(double tol) const {
  const PolynomialHamiltonian c = conj();
  if (c.terms_.size() != terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& a = terms_[i];
    const Term& b = c.terms_[i];
    if (a.alpha != b.alpha || a.beta != b.beta || a.denom_pow != b.denom_pow) return false;
    if (std::abs(a.coeff - b.coeff) > tol * std::max(1.0, std::abs(a.coeff))) return false;
  }
  return true;
}

PolynomialHamiltonian PolynomialHamiltonian::real_part() const {
  return cplx(0.5) * (*this + conj());
}

PolynomialHamiltonian PolynomialHamiltonian::imag_part() const {
  return cplx(0.0, -0.5) * (*this - conj());
}

int PolynomialHamiltonian::degree() const {
  int d = 0;
  for (const Term& t : terms_) {
    int s = -2 * t.denom_pow;
    for (int a : t.alpha) s += a;
    for (int b : t.beta) s += b;
    d = std::max(d, s);
  }
  return d;
}

PolynomialHamiltonian operator+(const PolynomialHamiltonian& a, const PolynomialHamiltonian& b) {
  if (!(a.model_ == b.model_)) throw std::invalid_argument("hamiltonians on different models");
  std::vector<Term> ts = a.terms_;
  const auto bt = b.in_chart(a.chart_).terms_;
  ts.insert(ts.end(), bt.begin(), bt.end());
  return PolynomialHamiltonian(a.model_, std::move(ts), a.chart_);
}

PolynomialHamiltonian operator-(const PolynomialHamiltonian& a, const PolynomialHamiltonian& b) {
  return a + cplx(-1.0) * b;
}

PolynomialHamiltonian operator*(const PolynomialHamiltonian& a, const PolynomialHamiltonian& b) {
  if (!(a.model_ == b.model_)) throw std::invalid_argument("hamiltonians on different models");
  const auto bt = b.in_chart(a.chart_).terms_;
  std::vector<Term> ts;
  for (const Term& x : a.terms_) {
    for (const Term& y : bt) {
      Term t{x.coeff * y.coeff, x.alpha, x.beta, x.denom_pow + y.denom_pow};
      for (std::size_t j = 0; j < t.alpha.size(); ++j) {
        t.alpha[j] += y.alpha[j];
        t.beta[j] += y.beta[j];
      }
      ts.push_back(std::move(t));
    }
  }
  return PolynomialHamiltonian(a.model_, std::move(ts), a.chart_);
}

PolynomialHamiltonian operator*(cplx s, const PolynomialHamiltonian& h) {
  std::vector<Term> ts = h.terms_;
  for (Term& t : ts) t.coeff *= s;
  return PolynomialHamiltonian(h.model_, std::move(ts), h.chart_);
}

HolomorphicHamiltonian::HolomorphicHamiltonian(const PolynomialHamiltonian& h)
    : model_(h.model()), source_(h) {
  per_chart_.resize(model_.chart_count());
  for (int c = 0; c < model_.chart_count(); ++c) per_chart_[c] = h.in_chart(c).terms();
}

cplx HolomorphicHamiltonian::value(const AmbientPoint& p) const {
  return eval_terms(per_chart_.at(p.chart), p.z, p.u, false).value;
}

HamiltonianJet HolomorphicHamiltonian::jet(const AmbientPoint& p, bool with_hessian) const {
  return eval_terms(per_chart_.at(p.chart), p.z, p.u, with_hessian);
}

HolomorphicHamiltonian extend(const PolynomialHamiltonian& h) { return HolomorphicHamiltonian(h); }

Partials eval_with_partials(const HolomorphicHamiltonian& H, const AmbientPoint& p) {
  const HamiltonianJet j = H.jet(p, false);
  return {j.value, j.dz, j.du};
}

PolynomialHamiltonian sphere_moment(int k) {
  const auto model = ModelDescriptor::sphere();
  auto term = [](cplx c, int a, int b) { return Term{c, {a}, {b}, 1}; };
  switch (k) {
    case 1:
      return PolynomialHamiltonian(model, {term(1.0, 1, 0), term(1.0, 0, 1)});
    case 2:
      return PolynomialHamiltonian(model, {term(-kI, 1, 0), term(kI, 0, 1)});
    case 3:
      return PolynomialHamiltonian(model, {term(1.0, 0, 0), term(-1.0, 1, 1)});
    default:
      throw std::invalid_argument("sphere moment map component must be 1, 2 or 3");
  }
}

}  // namespace hamflow
