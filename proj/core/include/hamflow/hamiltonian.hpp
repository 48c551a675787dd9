#pragma once

// Complex-valued hamiltonians on M given per chart as finite sums
//
//   h(z) = sum_k c_k z^alpha_k conj(z)^beta_k / (1 + z.conj(z))^denom_k
//
// and their holomorphic extensions H(z, u) to X obtained by the substitution
// conj(z) -> u. On the flat model denom is always 0. On the sphere the
// rational factor is what makes the moment-map components smooth at both
// poles; the chart transition z -> 1/z maps a term to
// (c, denom - alpha, denom - beta, denom), so exponents are signed.

#include <vector>

#include "hamflow/geometry.hpp"

namespace hamflow {

struct Term {
  cplx coeff;
  std::vector<int> alpha;
  std::vector<int> beta;
  int denom_pow = 0;
};

class PolynomialHamiltonian {
 public:
  PolynomialHamiltonian() = default;
  PolynomialHamiltonian(ModelDescriptor model, std::vector<Term> terms, int chart = 0);

  static PolynomialHamiltonian constant(ModelDescriptor model, cplx c);
  /// Single term c z^alpha conj(z)^beta / (1 + z conj z)^denom.
  static PolynomialHamiltonian monomial(ModelDescriptor model, cplx c, std::vector<int> alpha,
                                        std::vector<int> beta, int denom_pow = 0);

  const ModelDescriptor& model() const { return model_; }
  int chart() const { return chart_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Same function written in another chart.
  PolynomialHamiltonian in_chart(int chart) const;

  cplx operator()(const KahlerPoint& x) const;

  /// Complex partials (dh/dq_j, dh/dp_j) in the chart of x, real layout order.
  CVector real_gradient(const KahlerPoint& x) const;

  /// Coefficient test c(alpha, beta, k) = conj(c(beta, alpha, k)).
  bool is_real(double tol = 1e-14) const;

  PolynomialHamiltonian conj() const;
  PolynomialHamiltonian real_part() const;
  PolynomialHamiltonian imag_part() const;

  /// Maximum of |alpha| + |beta| - 2 denom over terms (pole order at infinity
  /// on the sphere; plain total degree on the flat model).
  int degree() const;

  friend PolynomialHamiltonian operator+(const PolynomialHamiltonian& a,
                                         const PolynomialHamiltonian& b);
  friend PolynomialHamiltonian operator-(const PolynomialHamiltonian& a,
                                         const PolynomialHamiltonian& b);
  friend PolynomialHamiltonian operator*(const PolynomialHamiltonian& a,
                                         const PolynomialHamiltonian& b);
  friend PolynomialHamiltonian operator*(cplx s, const PolynomialHamiltonian& h);

 private:
  void canonicalize();

  ModelDescriptor model_;
  int chart_ = 0;
  std::vector<Term> terms_;
};

/// Value, first and second holomorphic partials of H at an ambient point.
/// `hessian` is 2n x 2n over (z_1..z_n, u_1..u_n).
struct HamiltonianJet {
  cplx value;
  CVector dz;
  CVector du;
  CMatrix hessian;
};

class HolomorphicHamiltonian {
 public:
  HolomorphicHamiltonian() = default;
  explicit HolomorphicHamiltonian(const PolynomialHamiltonian& h);

  const ModelDescriptor& model() const { return model_; }
  /// Restriction h = H o iota, in its original chart.
  const PolynomialHamiltonian& restriction() const { return source_; }
  /// Term list (conj(z) already renamed to u) in the given chart.
  const std::vector<Term>& terms(int chart) const { return per_chart_.at(chart); }

  cplx value(const AmbientPoint& p) const;
  HamiltonianJet jet(const AmbientPoint& p, bool with_hessian = true) const;

 private:
  ModelDescriptor model_;
  PolynomialHamiltonian source_;
  std::vector<std::vector<Term>> per_chart_;
};

HolomorphicHamiltonian extend(const PolynomialHamiltonian& h);

struct Partials {
  cplx value;
  CVector dHdz;
  CVector dHdu;
};
Partials eval_with_partials(const HolomorphicHamiltonian& H, const AmbientPoint& p);

/// Moment-map component x_k (k = 1, 2, 3) of the unit sphere in chart 0:
/// x1 + i x2 = 2z / (1 + |z|^2), x3 = (1 - |z|^2) / (1 + |z|^2).
PolynomialHamiltonian sphere_moment(int k);

}  // namespace hamflow
