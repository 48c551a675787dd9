#include <gtest/gtest.h>

#include <numbers>

#include "hamflow/errors.hpp"
#include "hamflow/leaf.hpp"
#include "hamflow/oracles.hpp"
#include "support.hpp"

using namespace hamflow;
using namespace hamflow::testing;

namespace {

const ModelDescriptor kFlat1 = ModelDescriptor::flat(1);
const ModelDescriptor kSphere = ModelDescriptor::sphere();

KahlerPoint pt(cplx z) { return make_point(kFlat1, z); }

PolynomialHamiltonian izz() { return kI * mono(kFlat1, 1.0, {1}, {1}); }

Matrix J0(int n) { return complex_structure(n, n); }

}  // namespace

TEST(Phi, ImaginaryOscillatorDoublesAtLogTwoOverTwo) {
  const LeafSolution s = phi(extend(izz()), pt(1.0), std::log(2.0) / 2, tight_config());
  EXPECT_LE(std::abs(s.y.z(0) - 2.0), 1e-9);
  EXPECT_LE(s.residual, 1e-12);
}

TEST(Phi, ZeroTimeIsIdentity) {
  Random rng(31);
  const auto h = rng.complex_flat(2, 3, 4, 1.0);
  const KahlerPoint x = rng.flat_point(2, 0.5);
  const LeafSolution s = phi(extend(h), x, 0.0, SolverConfig{});
  EXPECT_EQ(s.y.z, x.z);
  EXPECT_EQ(s.u_star, x.z.conjugate());
  EXPECT_EQ(s.newton_iters, 0);
}

TEST(Phi, ImaginaryPositionTranslates) {
  const auto iq = 0.5 * kI * (mono(kFlat1, 1.0, {1}, {0}) + mono(kFlat1, 1.0, {0}, {1}));
  for (double t : {0.1, 0.4, 1.0}) {
    const LeafSolution s = phi(extend(iq), pt(cplx(0.3, -0.7)), t, tight_config());
    EXPECT_LE(std::abs(s.y.z(0) - cplx(0.3 + t, -0.7)), 1e-10) << t;
  }
}

TEST(Phi, HolomorphicHamiltonianIsStationary) {
  // i z^3 has no conj(z) dependence: the leaf {z = z_x} is carried to itself
  const auto h = mono(kFlat1, kI, {3}, {0});
  for (double t : {0.1, 0.3}) {
    const LeafSolution s = phi(extend(h), pt(cplx(0.8, 0.4)), t, tight_config());
    EXPECT_LE(std::abs(s.y.z(0) - cplx(0.8, 0.4)), 1e-12);
  }
}

TEST(Phi, RealHamiltonianFollowsHamiltonFlow) {
  Random rng(32);
  for (int k = 0; k < 6; ++k) {
    const auto h = k % 2 ? rng.real_sphere(2, 3, 0.7) : rng.real_flat(1 + k % 3 / 2, 3, 3, 0.5);
    const KahlerPoint x = rng.point(h.model(), 0.5);
    for (double t : {0.1, 0.3}) {
      const LeafSolution s = phi(extend(h), x, t, tight_config());
      const KahlerPoint ref = real_reference(h, x, t);
      EXPECT_LE(chart_distance(h.model(), to_chart(h.model(), s.y, ref.chart), ref), 1e-8);
    }
  }
}

TEST(Phi, WarmStartKeepsNewtonShort) {
  Random rng(33);
  std::vector<double> times;
  for (int k = 1; k <= 10; ++k) times.push_back(0.03 * k);
  const SolverConfig cfg;
  for (const CorpusEntry& e : residual_corpus()) {
    for (int s = 0; s < 3; ++s) {
      const KahlerPoint x = rng.point(e.h.model(), e.seed_radius);
      for (const LeafSolution& sol : phi_path(extend(e.h), x, times, cfg)) {
        EXPECT_LE(sol.newton_iters, 10) << e.name << " t=" << sol.t;
        EXPECT_LE(sol.residual, cfg.newton.tol);
      }
    }
  }
}

TEST(Phi, QuarticLeavesTheInterval) {
  // strong quartic: the transported leaf stops meeting the real locus before t = 0.4
  const auto h = izz() + mono(kFlat1, 0.2 * kI, {2}, {2});
  std::vector<double> times;
  for (int k = 1; k <= 40; ++k) times.push_back(0.01 * k);
  try {
    phi_path(extend(h), pt(0.6), times, SolverConfig{});
    FAIL() << "expected degeneracy";
  } catch (const LeafDegeneracy& e) {
    EXPECT_GT(e.last_good_time(), 0.05);
    EXPECT_LT(e.last_good_time(), 0.4);
  }
}

TEST(Phi, StiffCubicReportsDegeneracy) {
  const auto h = mono(kFlat1, kI, {3}, {0}) + mono(kFlat1, kI, {0}, {3});
  std::vector<double> times;
  for (int k = 1; k <= 50; ++k) times.push_back(0.01 * k);
  try {
    phi_path(extend(h), pt(3.0), times, SolverConfig{});
    FAIL() << "expected degeneracy";
  } catch (const LeafDegeneracy& e) {
    EXPECT_TRUE(std::isfinite(e.last_good_time()));
    EXPECT_GE(e.last_good_time(), 0.0);
    EXPECT_LT(e.last_good_time(), 0.5);
  }
}

TEST(PiT, RealLocusPointIsItsOwnAnchor) {
  Random rng(34);
  for (const CorpusEntry& e : residual_corpus()) {
    const HolomorphicHamiltonian H = extend(e.h);
    const KahlerPoint x = rng.point(e.h.model(), e.seed_radius);
    const LeafSolution s = phi(H, x, 0.2, SolverConfig{});
    const KahlerPoint back = pi_t(H, embed(s.y), 0.2, SolverConfig{});
    EXPECT_LE(chart_distance(e.h.model(), to_chart(e.h.model(), back, s.y.chart), s.y), 1e-9) << e.name;
  }
}

TEST(PiT, ZeroTimeDropsFibre) {
  const AmbientPoint p{0, CVector::Constant(1, cplx(1, 1)), CVector::Constant(1, cplx(7, -3))};
  const KahlerPoint x = pi_t(extend(izz()), p, 0.0, SolverConfig{});
  EXPECT_EQ(x.z(0), cplx(1, 1));
}

TEST(PiT, ConstantOnTransportedLeaf) {
  Random rng(35);
  const SolverConfig cfg = tight_config();
  const CorpusEntry e = residual_corpus()[3];
  const HolomorphicHamiltonian H = extend(e.h);
  const KahlerPoint x = rng.point(e.h.model(), e.seed_radius);
  const LeafSolution s = phi(H, x, 0.2, cfg);
  for (int k = 0; k < 5; ++k) {
    const CVector u = s.u_star + rng.cvector(1, 0.05);
    const FlowState q = flow(H, AmbientPoint{x.chart, x.z, u}, 0.2, cfg.integrator, false);
    EXPECT_LE(chart_distance(kFlat1, pi_t(H, q.point, 0.2, cfg), s.y), 1e-9);
  }
}

TEST(JT, ZeroTimeIsStandard) {
  Random rng(36);
  for (const CorpusEntry& e : residual_corpus()) {
    const KahlerPoint x = rng.point(e.h.model(), e.seed_radius);
    const Matrix J = j_t(extend(e.h), x, 0.0, SolverConfig{});
    EXPECT_LE((J - J0(e.h.model().n)).cwiseAbs().maxCoeff(), 1e-12) << e.name;
  }
}

TEST(JT, MomentMapCaseStaysStandard) {
  Random rng(37);
  const auto h = cplx(0.7) * sphere_moment(3) + cplx(0, 1.3) * sphere_moment(3);
  for (int k = 0; k < 5; ++k) {
    const KahlerPoint x = rng.sphere_point();
    for (double t : {0.1, 0.3, 0.5}) {
      const Matrix J = j_t(extend(h), x, t, tight_config());
      EXPECT_LE((J - J0(1)).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(JT, HolomorphicSquareLeavesStructureUnchanged) {
  const Matrix J = j_t(extend(mono(kFlat1, kI, {2}, {0})), pt(cplx(0.4, 0.2)), 0.1, tight_config());
  EXPECT_LE((J - J0(1)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(JT, NonNormalQuadraticMatchesOracle) {
  // i (z^2 + conj(z)^2): H = i z^2 + i u^2
  const auto h = mono(kFlat1, kI, {2}, {0}) + mono(kFlat1, kI, {0}, {2});
  QuadraticSpec spec;
  spec.n = 1;
  spec.A = CMatrix::Zero(2, 2);
  spec.A(0, 0) = spec.A(1, 1) = 2.0 * kI;
  spec.b = CVector::Zero(2);
  const KahlerPoint x = pt(cplx(0.4, 0.2));
  const QuadraticResult ref = oracle_quadratic(spec, x.z, 0.1);
  const LeafSolution s = phi(extend(h), x, 0.1, tight_config());
  const Matrix J = j_t(s, tight_config().newton);
  EXPECT_GT((J - J0(1)).cwiseAbs().maxCoeff(), 1e-2);
  EXPECT_LE((J - ref.Jt).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((s.y.z - ref.y).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(JT, SquaresToMinusIdentity) {
  Random rng(38);
  for (const CorpusEntry& e : residual_corpus()) {
    const int n = e.h.model().n;
    for (int k = 0; k < 3; ++k) {
      const KahlerPoint x = rng.point(e.h.model(), e.seed_radius);
      const Matrix J = j_t(extend(e.h), x, rng.uniform(0.05, 0.3), SolverConfig{});
      EXPECT_LE((J * J + Matrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff(), 1e-8) << e.name;
    }
  }
}

TEST(Frame, DphiMatchesFiniteDifferences) {
  Random rng(39);
  const SolverConfig cfg = tight_config();
  const double h = 1e-5;
  for (const CorpusEntry& e : residual_corpus()) {
    const ModelDescriptor& m = e.h.model();
    const HolomorphicHamiltonian H = extend(e.h);
    const KahlerPoint x = rng.point(m, e.seed_radius);
    const double t = 0.2;
    const LeafSolution s = phi(H, x, t, cfg);
    const FrameData fr = frame(H, s, cfg);
    for (int j = 0; j < 2 * m.n; ++j) {
      Vector d = Vector::Zero(2 * m.n);
      d(j) = h;
      auto shifted = [&](double sign) {
        const KahlerPoint xs{x.chart, from_real(to_real(x.z, m.n) + sign * d, m.n)};
        return to_real(to_chart(m, phi(H, xs, t, cfg, s.u_star).y, s.y.chart).z, m.n);
      };
      const Vector col = (shifted(1) - shifted(-1)) / (2 * h);
      EXPECT_LE((col - fr.dphi.col(j)).cwiseAbs().maxCoeff(), 1e-6) << e.name;
    }
    // omega_t antisymmetric
    EXPECT_LE((fr.omega_t + fr.omega_t.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Frame, PhiIsHolomorphicIntoJt) {
  Random rng(40);
  const SolverConfig cfg = tight_config();
  for (const CorpusEntry& e : residual_corpus()) {
    const int n = e.h.model().n;
    const HolomorphicHamiltonian H = extend(e.h);
    const LeafSolution s = phi(H, rng.point(e.h.model(), e.seed_radius), 0.25, cfg);
    const FrameData fr = frame(H, s, cfg);
    EXPECT_LE((fr.Jt * fr.dphi - fr.dphi * J0(n)).cwiseAbs().maxCoeff(), 1e-8) << e.name;
  }
}

TEST(F, ZeroTimeAndScaling) {
  const HolomorphicHamiltonian H = extend(izz());
  EXPECT_LE(std::abs(f(H, pt(1.0), std::log(2.0) / 2, tight_config()).z(0) - 2.0), 1e-9);
  const KahlerPoint x = pt(cplx(0.3, -0.2));
  EXPECT_EQ(f(H, x, 0.0, SolverConfig{}).z, x.z);
}

TEST(F, RealHamiltonianMatchesPhi) {
  Random rng(41);
  const auto h = rng.real_flat(1, 3, 3, 0.5);
  const KahlerPoint x = rng.flat_point(1, 0.5);
  const SolverConfig cfg = tight_config();
  EXPECT_LE(chart_distance(kFlat1, f(extend(h), x, 0.3, cfg), phi(extend(h), x, 0.3, cfg).y), 1e-9);
}

TEST(F, JacobianMatchesFiniteDifferences) {
  Random rng(42);
  const SolverConfig cfg = tight_config();
  const CorpusEntry e = residual_corpus()[6];
  const HolomorphicHamiltonian H = extend(e.h);
  const KahlerPoint x = rng.sphere_point();
  const MapWithJacobian fj = f_with_jacobian(H, x, 0.2, cfg);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Vector d = Vector::Zero(2);
    d(j) = h;
    auto shifted = [&](double sign) {
      const KahlerPoint xs{x.chart, from_real(to_real(x.z, 1) + sign * d, 1)};
      return to_real(to_chart(kSphere, f(H, xs, 0.2, cfg), fj.y.chart).z, 1);
    };
    EXPECT_LE(((shifted(1) - shifted(-1)) / (2 * h) - fj.jacobian.col(j)).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(F, InverseOfPhiBackwards) {
  Random rng(43);
  const SolverConfig cfg = tight_config();
  for (const CorpusEntry& e : residual_corpus()) {
    const ModelDescriptor& m = e.h.model();
    const HolomorphicHamiltonian H = extend(e.h);
    for (int k = 0; k < 2; ++k) {
      const KahlerPoint x = rng.point(m, e.seed_radius);
      const double t = rng.uniform(0.05, 0.3);
      const KahlerPoint back = f(H, phi(H, x, -t, cfg).y, t, cfg);
      EXPECT_LE(chart_distance(m, x, to_chart(m, back, x.chart)), 1e-6) << e.name;
      const KahlerPoint y = f(H, x, t, cfg);
      const KahlerPoint pre = f_inverse(H, y, t, cfg);
      EXPECT_LE(chart_distance(m, x, to_chart(m, pre, x.chart)), 1e-8) << e.name;
    }
  }
}

TEST(OmegaT, ZeroTimeIsOmega) {
  Random rng(44);
  const KahlerPoint y = rng.sphere_point();
  const Matrix w = omega_t(extend(residual_corpus()[5].h), y, 0.0, SolverConfig{});
  EXPECT_LE((w - omega_matrix(kSphere, y)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OmegaT, ScalingShrinksForm) {
  const double t = 0.15;
  const Matrix w = omega_t(extend(izz()), pt(cplx(0.5, 0.3)), t, tight_config());
  EXPECT_LE((w - std::exp(-4 * t) * omega_matrix(kFlat1, pt(0.0))).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(OmegaT, RealHamiltonianPreservesOmega) {
  Random rng(45);
  const auto h = rng.real_sphere(2, 3, 0.7);
  const KahlerPoint y = rng.sphere_point();
  const Matrix w = omega_t(extend(h), y, 0.3, tight_config());
  EXPECT_LE((w - omega_matrix(kSphere, y)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Compatibility, StandardPairIsPositive) {
  EXPECT_NEAR(compatibility_min_eigenvalue(kFlat1, pt(0.3), J0(1)), 1.0, 1e-14);
  EXPECT_LT(compatibility_min_eigenvalue(kFlat1, pt(0.3), -J0(1)), 0.0);
}
