#include <gtest/gtest.h>

#include "hamflow/hamiltonian.hpp"
#include "support.hpp"

using namespace hamflow;
using namespace hamflow::testing;

namespace {

const ModelDescriptor kFlat1 = ModelDescriptor::flat(1);
const ModelDescriptor kSphere = ModelDescriptor::sphere();

AmbientPoint ambient(cplx z, cplx u, int chart = 0) {
  return AmbientPoint{chart, CVector::Constant(1, z), CVector::Constant(1, u)};
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Extend, SubstitutesConjugateByU) {
  const HolomorphicHamiltonian H = extend(mono(kFlat1, 1.0, {1}, {1}));
  ASSERT_EQ(H.terms(0).size(), 1u);
  EXPECT_EQ(H.value(ambient(2.0, 3.0)), cplx(6.0));
}

TEST(Extend, PositionIsHalfSumOfZAndU) {
  const auto q = mono(kFlat1, 0.5, {1}, {0}) + mono(kFlat1, 0.5, {0}, {1});
  EXPECT_EQ(extend(q).value(ambient(1.0, kI)), 0.5 * (1.0 + kI));
  EXPECT_EQ(extend(kI * mono(kFlat1, 1.0, {1}, {1})).value(ambient(2.0, 3.0)), 6.0 * kI);
}

TEST(EvalWithPartials, Bilinear) {
  const Partials p = eval_with_partials(extend(mono(kFlat1, 1.0, {1}, {1})), ambient(2.0, 3.0));
  EXPECT_EQ(p.value, cplx(6));
  EXPECT_EQ(p.dHdz(0), cplx(3));
  EXPECT_EQ(p.dHdu(0), cplx(2));
}

TEST(EvalWithPartials, Linear) {
  const auto q = mono(kFlat1, 0.5, {1}, {0}) + mono(kFlat1, 0.5, {0}, {1});
  const Partials p = eval_with_partials(extend(q), ambient(cplx(3, -1), cplx(0.2, 5)));
  EXPECT_EQ(p.dHdz(0), cplx(0.5));
  EXPECT_EQ(p.dHdu(0), cplx(0.5));
}

TEST(EvalWithPartials, SquareTimesU) {
  const Partials p = eval_with_partials(extend(mono(kFlat1, 1.0, {2}, {1})), ambient(cplx(1, 1), 1.0));
  EXPECT_LE(std::abs(p.dHdz(0) - 2.0 * cplx(1, 1)), 1e-15);
  EXPECT_LE(std::abs(p.dHdu(0) - 2.0 * kI), 1e-15);
}

TEST(EvalWithPartials, MatchesFiniteDifferences) {
  Random rng(11);
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const bool sphere = k % 2;
    const PolynomialHamiltonian poly =
        sphere ? rng.complex_sphere(3, 4, 1.0) : rng.complex_flat(2, 4, 5, 1.0);
    const HolomorphicHamiltonian H = extend(poly);
    const AmbientPoint p = rng.ambient_near_diagonal(rng.point(poly.model(), 0.8), 0.2);
    const HamiltonianJet j = H.jet(p, true);
    const int n = poly.model().n;
    for (int i = 0; i < 2 * n; ++i) {
      AmbientPoint plus = p, minus = p;
      // complex step in a holomorphic direction
      (i < n ? plus.z(i) : plus.u(i - n)) += h;
      (i < n ? minus.z(i) : minus.u(i - n)) -= h;
      const cplx fd = (H.value(plus) - H.value(minus)) / (2 * h);
      const cplx exact = i < n ? j.dz(i) : j.du(i - n);
      EXPECT_LE(rel(fd, exact), 1e-8);
      const HamiltonianJet jp = H.jet(plus, false), jm = H.jet(minus, false);
      for (int r = 0; r < 2 * n; ++r) {
        const cplx dp = r < n ? jp.dz(r) : jp.du(r - n);
        const cplx dm = r < n ? jm.dz(r) : jm.du(r - n);
        EXPECT_LE(rel((dp - dm) / (2 * h), j.hessian(r, i)), 1e-7);
      }
    }
  }
}

TEST(Extend, RestrictionIdentityOnRandomPolynomials) {
  Random rng(12);
  for (int k = 0; k < 20; ++k) {
    const PolynomialHamiltonian h =
        k % 4 == 3 ? rng.complex_sphere(3, 5, 1.0) : rng.complex_flat(1 + k % 2, 4, 6, 1.0);
    const HolomorphicHamiltonian H = extend(h);
    for (int s = 0; s < 5; ++s) {
      const KahlerPoint x = rng.point(h.model(), 1.2);
      EXPECT_LE(rel(H.value(embed(x)), h(x)), 1e-12);
    }
  }
}

TEST(Extend, RealityCriterion) {
  Random rng(13);
  for (int k = 0; k < 20; ++k) {
    const PolynomialHamiltonian h = k % 2 ? rng.real_sphere(3, 4, 1.0) : rng.real_flat(2, 4, 4, 1.0);
    EXPECT_TRUE(h.is_real());
    const HolomorphicHamiltonian H = extend(h);
    for (int s = 0; s < 5; ++s) {
      const KahlerPoint x = rng.point(h.model(), 1.0);
      EXPECT_LE(std::abs(h(x).imag()), 1e-12 * std::max(1.0, std::abs(h(x))));
      // tau^* H = conj(H)
      const AmbientPoint p = rng.ambient_near_diagonal(x, 0.5);
      EXPECT_LE(rel(H.value(involution(p)), std::conj(H.value(p))), 1e-12);
    }
  }
  EXPECT_FALSE((kI * mono(kFlat1, 1.0, {1}, {1})).is_real());
  EXPECT_FALSE(mono(kFlat1, 1.0, {2}, {0}).is_real());
}

TEST(Extend, RealLinear) {
  Random rng(14);
  const auto h1 = rng.complex_flat(1, 3, 4, 1.0), h2 = rng.complex_flat(1, 3, 4, 1.0);
  const double a = 0.7, b = -1.3;
  const HolomorphicHamiltonian sum = extend(a * h1 + b * h2);
  const HolomorphicHamiltonian H1 = extend(h1), H2 = extend(h2);
  for (int s = 0; s < 10; ++s) {
    const AmbientPoint p = rng.ambient_near_diagonal(rng.flat_point(1, 1.0), 0.5);
    EXPECT_LE(rel(sum.value(p), a * H1.value(p) + b * H2.value(p)), 1e-13);
  }
}

TEST(PolynomialHamiltonian, RealAndImaginaryParts) {
  Random rng(15);
  const auto h = rng.complex_flat(1, 3, 5, 1.0);
  const auto re = h.real_part(), im = h.imag_part();
  EXPECT_TRUE(re.is_real());
  EXPECT_TRUE(im.is_real());
  const KahlerPoint x = rng.flat_point(1, 1.0);
  EXPECT_LE(std::abs(re(x) - h(x).real()), 1e-13);
  EXPECT_LE(std::abs(im(x) - h(x).imag()), 1e-13);
  EXPECT_LE(std::abs(h.conj()(x) - std::conj(h(x))), 1e-13);
}

TEST(PolynomialHamiltonian, CanonicalFormMergesTerms) {
  const auto h = mono(kFlat1, 1.0, {1}, {1}) + mono(kFlat1, 2.0, {1}, {1});
  ASSERT_EQ(h.terms().size(), 1u);
  EXPECT_EQ(h.terms()[0].coeff, cplx(3));
  EXPECT_TRUE((h - h).terms().empty());
  EXPECT_EQ(h.degree(), 2);
}

TEST(PolynomialHamiltonian, ProductAndDegree) {
  const auto x3 = sphere_moment(3);
  const auto sq = x3 * x3;
  EXPECT_EQ(sq.degree(), 0);
  const KahlerPoint p = make_point(kSphere, cplx(0.4, 0.3));
  EXPECT_LE(std::abs(sq(p) - x3(p) * x3(p)), 1e-15);
  EXPECT_EQ((mono(kFlat1, 1.0, {2}, {1}) * mono(kFlat1, 1.0, {0}, {1})).degree(), 4);
}

TEST(PolynomialHamiltonian, RejectsMalformedTerms) {
  EXPECT_THROW(PolynomialHamiltonian(kFlat1, {Term{1.0, {1, 0}, {0}, 0}}), std::invalid_argument);
  EXPECT_THROW(PolynomialHamiltonian(kFlat1, {Term{1.0, {1}, {0}, 1}}), std::invalid_argument);
  EXPECT_THROW(PolynomialHamiltonian(kFlat1, {Term{NAN, {1}, {0}, 0}}), std::invalid_argument);
  EXPECT_THROW(PolynomialHamiltonian(kFlat1, {}, 1), std::invalid_argument);
}

TEST(SphereMoment, UnitSphereAndRealValued) {
  Random rng(16);
  for (int k = 0; k < 50; ++k) {
    const KahlerPoint x = rng.sphere_point();
    const double x1 = sphere_moment(1)(x).real(), x2 = sphere_moment(2)(x).real(),
                 x3 = sphere_moment(3)(x).real();
    EXPECT_NEAR(x1 * x1 + x2 * x2 + x3 * x3, 1.0, 1e-14);
    for (int c = 1; c <= 3; ++c) EXPECT_TRUE(sphere_moment(c).is_real());
  }
  // chart 0 origin is the x3 = +1 pole
  EXPECT_NEAR(sphere_moment(3)(make_point(kSphere, 0.0)).real(), 1.0, 0.0);
  EXPECT_NEAR(sphere_moment(3)(make_point(kSphere, 0.0, 1)).real(), -1.0, 0.0);
  EXPECT_THROW(sphere_moment(4), std::invalid_argument);
}

TEST(SphereMoment, ChartsAgree) {
  Random rng(17);
  for (int k = 0; k < 30; ++k) {
    const auto h = rng.complex_sphere(3, 4, 1.0);
    const KahlerPoint x = make_point(kSphere, rng.complex(2.0) + 0.1);
    const KahlerPoint y = to_chart(kSphere, x, 1);
    EXPECT_LE(rel(h(y), h(x)), 1e-12);
    EXPECT_LE(rel(h.in_chart(1)(y), h(x)), 1e-12);
    const HolomorphicHamiltonian H = extend(h);
    const AmbientPoint p = rng.ambient_near_diagonal(x, 0.2);
    EXPECT_LE(rel(H.value(to_chart(kSphere, p, 1)), H.value(p)), 1e-12);
  }
}

TEST(PolynomialHamiltonian, RealGradientMatchesFiniteDifferences) {
  Random rng(18);
  const auto h = rng.complex_flat(2, 3, 5, 1.0);
  const KahlerPoint x = rng.flat_point(2, 1.0);
  const CVector g = h.real_gradient(x);
  const double step = 1e-6;
  for (int i = 0; i < 4; ++i) {
    KahlerPoint plus = x, minus = x;
    const cplx dir = i < 2 ? cplx(1) : kI;
    plus.z(i % 2) += step * dir;
    minus.z(i % 2) -= step * dir;
    EXPECT_LE(rel((h(plus) - h(minus)) / (2 * step), g(i)), 1e-8);
  }
}
