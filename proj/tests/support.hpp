#pragma once

// Shared fixtures for unit, property and acceptance tests: deterministic
// random hamiltonians and points, and the fixed residual corpus.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hamflow/leaf.hpp"

namespace hamflow::testing {

inline SolverConfig tight_config() {
  SolverConfig c;
  c.integrator.abs_tol = c.integrator.rel_tol = 1e-12;
  c.newton.tol = 1e-12;
  return c;
}

class Random {
 public:
  explicit Random(unsigned seed) : gen_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }
  cplx complex(double r) { return {uniform(-r, r), uniform(-r, r)}; }

  CVector cvector(int n, double r) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = complex(r);
    return v;
  }

  KahlerPoint flat_point(int n, double r) { return KahlerPoint{0, cvector(n, r)}; }

  /// Uniform on S^2, returned in its preferred chart.
  KahlerPoint sphere_point() {
    const double x3 = uniform(-0.95, 0.95);
    const double phase = uniform(0.0, 2 * std::numbers::pi);
    // chart 0: |z|^2 = (1 - x3) / (1 + x3)
    const cplx z = std::polar(std::sqrt((1 - x3) / (1 + x3)), phase);
    return normalize_chart(ModelDescriptor::sphere(), make_point(ModelDescriptor::sphere(), z));
  }

  KahlerPoint point(const ModelDescriptor& m, double r) {
    return m.kind == ModelKind::sphere ? sphere_point() : flat_point(m.n, r);
  }

  AmbientPoint ambient_near_diagonal(const KahlerPoint& x, double r) {
    AmbientPoint p = embed(x);
    p.u += cvector(static_cast<int>(x.z.size()), r);
    return p;
  }

  /// Unit vector in R^3.
  Eigen::Vector3d axis() {
    Eigen::Vector3d v;
    do {
      v << uniform(-1, 1), uniform(-1, 1), uniform(-1, 1);
    } while (v.norm() < 0.2 || v.norm() > 1.0);
    return v.normalized();
  }

  /// Random multi-index pair with |alpha| + |beta| <= degree.
  std::pair<std::vector<int>, std::vector<int>> exponents(int n, int degree) {
    std::vector<int> a(n, 0), b(n, 0);
    const int d = integer(0, degree);
    for (int k = 0; k < d; ++k) {
      if (integer(0, 1) == 0) ++a[integer(0, n - 1)];
      else ++b[integer(0, n - 1)];
    }
    return {a, b};
  }

  /// Real polynomial of degree <= degree: each term is paired with its conjugate.
  PolynomialHamiltonian real_flat(int n, int degree, int terms, double scale) {
    std::vector<Term> ts;
    for (int k = 0; k < terms; ++k) {
      auto [a, b] = exponents(n, degree);
      const cplx c = complex(scale);
      ts.push_back(Term{c, a, b, 0});
      ts.push_back(Term{std::conj(c), b, a, 0});
    }
    return PolynomialHamiltonian(ModelDescriptor::flat(n), ts);
  }

  PolynomialHamiltonian complex_flat(int n, int degree, int terms, double scale) {
    std::vector<Term> ts;
    for (int k = 0; k < terms; ++k) {
      auto [a, b] = exponents(n, degree);
      ts.push_back(Term{complex(scale), a, b, 0});
    }
    return PolynomialHamiltonian(ModelDescriptor::flat(n), ts);
  }

  /// Smooth sphere terms z^a conj(z)^b / (1 + |z|^2)^k with a, b <= k <= max_k.
  PolynomialHamiltonian real_sphere(int max_k, int terms, double scale) {
    std::vector<Term> ts;
    for (int i = 0; i < terms; ++i) {
      const int k = integer(1, max_k);
      const int a = integer(0, k), b = integer(0, k);
      const cplx c = complex(scale);
      ts.push_back(Term{c, {a}, {b}, k});
      ts.push_back(Term{std::conj(c), {b}, {a}, k});
    }
    return PolynomialHamiltonian(ModelDescriptor::sphere(), ts);
  }

  PolynomialHamiltonian complex_sphere(int max_k, int terms, double scale) {
    std::vector<Term> ts;
    for (int i = 0; i < terms; ++i) {
      const int k = integer(1, max_k);
      ts.push_back(Term{complex(scale), {integer(0, k)}, {integer(0, k)}, k});
    }
    return PolynomialHamiltonian(ModelDescriptor::sphere(), ts);
  }

  std::mt19937& engine() { return gen_; }

 private:
  std::mt19937 gen_;
};

inline PolynomialHamiltonian mono(const ModelDescriptor& m, cplx c, std::vector<int> a,
                                  std::vector<int> b, int k = 0) {
  return PolynomialHamiltonian::monomial(m, c, std::move(a), std::move(b), k);
}

/// h = a.x + i b.x on the sphere.
inline PolynomialHamiltonian moment_combination(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  PolynomialHamiltonian h = PolynomialHamiltonian::constant(ModelDescriptor::sphere(), 0.0);
  for (int k = 0; k < 3; ++k) h = h + cplx(a(k), b(k)) * sphere_moment(k + 1);
  return h;
}

/// Real derivative of tau in the ambient layout.
inline Matrix tau_derivative(int n) {
  const int m = 2 * n;
  Matrix swap = Matrix::Zero(2 * m, 2 * m);
  swap.topRightCorner(m, m) = Matrix::Identity(m, m);
  swap.bottomLeftCorner(m, m) = Matrix::Identity(m, m);
  return conjugation(2 * n, n) * swap;
}

// Complex 4n-vector of dH on real ambient directions.
inline CVector ambient_differential(const HolomorphicHamiltonian& H, const AmbientPoint& p) {
  const Partials d = eval_with_partials(H, p);
  const int n = static_cast<int>(p.z.size());
  CVector g(4 * n);
  g << d.dHdz, kI * d.dHdz, d.dHdu, kI * d.dHdu;
  return g;
}

struct CorpusEntry {
  std::string name;
  PolynomialHamiltonian h;
  double seed_radius;  // flat seeds are drawn from |Re|, |Im| <= radius
};

/// Eight hamiltonians: real, imaginary, mixed and cubic on each model.
inline std::vector<CorpusEntry> residual_corpus() {
  const auto fl = ModelDescriptor::flat(1);
  const auto sp = ModelDescriptor::sphere();
  const cplx i = kI;
  std::vector<CorpusEntry> c;
  c.push_back({"flat_real_cubic",
               mono(fl, 1.0, {1}, {1}) + mono(fl, 0.3, {2}, {1}) + mono(fl, 0.3, {1}, {2}), 0.6});
  c.push_back({"flat_imag_quartic", mono(fl, i, {1}, {1}) + mono(fl, 0.1 * i, {2}, {2}), 0.5});
  c.push_back({"flat_mixed_quadratic",
               mono(fl, 1.0, {1}, {1}) + mono(fl, 0.3 * i, {2}, {0}) + mono(fl, 0.3 * i, {0}, {2}) +
                   mono(fl, cplx(0.2, 0.4), {1}, {0}),
               0.8});
  c.push_back({"flat_complex_cubic",
               mono(fl, cplx(0.3, 0.7), {2}, {1}) + mono(fl, cplx(0.3, -0.7), {1}, {2}) +
                   mono(fl, 0.5 * i, {3}, {0}),
               0.5});
  c.push_back({"sphere_real", sphere_moment(3) + 0.5 * (sphere_moment(1) * sphere_moment(1)), 0.0});
  c.push_back({"sphere_imag", i * sphere_moment(2) + 0.5 * i * (sphere_moment(3) * sphere_moment(3)),
               0.0});
  c.push_back({"sphere_mixed",
               sphere_moment(1) + i * sphere_moment(3) + 0.3 * (sphere_moment(1) * sphere_moment(2)),
               0.0});
  c.push_back({"sphere_complex_cubic",
               mono(sp, cplx(0.5, 1.0), {2}, {1}, 2) + mono(sp, cplx(0.5, -1.0), {1}, {2}, 2) +
                   mono(sp, 0.4 * i, {0}, {1}, 1),
               0.0});
  return c;
}

}  // namespace hamflow::testing
