#pragma once

// Concrete Kähler manifolds M and their complexifications X = M x conj(M).
//
// Two models are provided: flat C^n with omega = (i/2) sum dz^dz̄ (= sum dq^dp)
// and the unit sphere S^2 = CP^1 with omega = 2i dz^dz̄ / (1+|z|^2)^2 (area 4π),
// covered by two stereographic charts related by z -> 1/z. Chart 0 sends the
// x3 = +1 pole to z = 0.
//
// X carries holomorphic coordinates (z, u) where u is the conjugated
// coordinate of the second factor; M sits in X as the real locus u = conj(z),
// tau(z, u) = (conj u, conj z), and Pi_0(z, u) = z.

#include "hamflow/linalg.hpp"

namespace hamflow {

enum class ModelKind { flat, sphere };

struct ModelDescriptor {
  ModelKind kind = ModelKind::flat;
  int n = 1;

  static ModelDescriptor flat(int n);
  static ModelDescriptor sphere();

  int chart_count() const { return kind == ModelKind::sphere ? 2 : 1; }
  bool operator==(const ModelDescriptor&) const = default;
};

/// Width of the chart-switch hysteresis band around |z| = 1 on the sphere.
inline constexpr double kChartHysteresis = 0.1;

/// |1 + z u| below this is treated as the antidiagonal of S^2 x S^2.
inline constexpr double kSphereGuardBand = 1e-8;

struct KahlerPoint {
  int chart = 0;
  CVector z;
};

struct AmbientPoint {
  int chart = 0;
  CVector z;
  CVector u;
};

/// Fixed structures at a point of M: omega and J0 as real 2n x 2n matrices in
/// the (q, p) basis, and the coefficient matrix of Omega = sum Omega_jk dz_j^du_k
/// at the embedded point.
struct SymplecticData {
  Matrix omega;
  Matrix J0;
  CMatrix Omega;
};

KahlerPoint make_point(const ModelDescriptor& model, cplx z, int chart = 0);
KahlerPoint make_point(const ModelDescriptor& model, const CVector& z, int chart = 0);

AmbientPoint embed(const KahlerPoint& x);
AmbientPoint involution(const AmbientPoint& p);
KahlerPoint project_pi0(const AmbientPoint& p);

bool on_real_locus(const AmbientPoint& p, double tol);

SymplecticData kahler_forms(const ModelDescriptor& model, const KahlerPoint& x);

/// omega at x as a real 2n x 2n matrix, omega(a, b) = a^T W b.
Matrix omega_matrix(const ModelDescriptor& model, const KahlerPoint& x);

/// Coefficients of Omega at an ambient point. Throws DomainError on the
/// sphere antidiagonal.
CMatrix holomorphic_form(const ModelDescriptor& model, const AmbientPoint& p);

/// Omega evaluated on pairs of real tangent vectors of X (4n real layout):
/// Omega(a, b) = a^T F b with F complex. Re F is omega_1, Im F is omega_2.
CMatrix ambient_form_matrix(const ModelDescriptor& model, const AmbientPoint& p);

/// Scalar s with Omega = s * sum dz_j^du_j for both models, together with the
/// holomorphic partials of 1/s. Used to invert Omega when building Hamilton
/// fields.
struct FormScale {
  cplx inverse;
  CVector d_inverse_dz;
  CVector d_inverse_du;
};
FormScale form_scale(const ModelDescriptor& model, const AmbientPoint& p);

/// Real 2n x 4n ambient lift v -> (v, conj v) of tangent vectors of M.
Matrix real_lift(int n);

// Chart handling. All functions are identities on the flat model.

KahlerPoint to_chart(const ModelDescriptor& model, const KahlerPoint& x, int chart);
AmbientPoint to_chart(const ModelDescriptor& model, const AmbientPoint& p, int chart);

/// Complex derivative of the chart transition at p (diagonal 2n x 2n), used to
/// carry flow Jacobians across a chart switch.
CMatrix chart_transition_derivative(const ModelDescriptor& model, const AmbientPoint& p);

/// Real derivative of the chart transition on M at x (2n x 2n).
Matrix chart_transition_derivative(const ModelDescriptor& model, const KahlerPoint& x);

/// Moves a sphere point to the other chart when |z| > 1 + hysteresis.
KahlerPoint normalize_chart(const ModelDescriptor& model, const KahlerPoint& x);

/// True if the ambient point should switch chart: max(|z|, |u|) exceeds
/// 1 + hysteresis and the other chart is strictly better.
bool should_switch_chart(const ModelDescriptor& model, const AmbientPoint& p);

/// Coordinate distance between two points of M, measured in the chart of `a`.
double chart_distance(const ModelDescriptor& model, const KahlerPoint& a, const KahlerPoint& b);

}  // namespace hamflow
