#pragma once

// Closed-form ground truth for three classes of hamiltonians. None of these
// routines touch the flow engine or the leaf solver.
//
//  - quadratic H on flat C^n: the complexified flow is affine, exp(tS), and
//    the transported leaf is an affine subspace; phi_t and J_t follow from
//    real-linear solves.
//  - complex combinations of sphere moment maps: phi_t is the Möbius action of
//    exp(t zeta) for a traceless 2x2 zeta.
//  - real h: the ordinary Hamilton flow on M.

#include <Eigen/Dense>

#include "hamflow/hamiltonian.hpp"

namespace hamflow {

/// H(w) = 1/2 w^T A w + b^T w + c with w = (z_1..z_n, u_1..u_n), A symmetric.
struct QuadraticSpec {
  int n = 1;
  CMatrix A;
  CVector b;
  cplx c = 0.0;

  void validate() const;
  /// The same hamiltonian as a term list, for feeding the leaf solver.
  PolynomialHamiltonian to_hamiltonian() const;
};

struct QuadraticResult {
  CVector y;
  Matrix Jt;
};

QuadraticResult oracle_quadratic(const QuadraticSpec& spec, const CVector& x, double t);

/// Traceless zeta in sl(2, C). For h = sum_k c_k x_k with complex c_k the
/// generator is sum_k c_k zeta_k; zeta_3 = diag(i/2, -i/2) is the rotation
/// generated by x3 (dz/dt = i z in chart 0).
struct Sl2Generator {
  Eigen::Matrix2cd zeta;

  static Sl2Generator from_moment(cplx c1, cplx c2, cplx c3);
  void validate() const;
};

/// exp(t zeta) . x on the Riemann sphere, computed in the chart of x; crossing
/// a pole switches chart and retries.
KahlerPoint oracle_mobius(const Sl2Generator& gen, const KahlerPoint& x, double t);

/// Hamilton flow of a real h on M (omega(Xi_h, .) = dh), integrated with a
/// Runge-Kutta-Fehlberg 7(8) stepper at the given tolerance. On the sphere the
/// result is returned in the better chart.
KahlerPoint real_reference(const PolynomialHamiltonian& h, const KahlerPoint& x, double t,
                           double tol = 1e-12);

/// Matrix exponential (scaling and squaring with a fixed-degree Padé approximant).
CMatrix expm(const CMatrix& a);

}  // namespace hamflow
