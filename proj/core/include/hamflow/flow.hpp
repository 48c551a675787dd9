#pragma once

// Complexified Hamilton flow Phi_t on X.
//
// Phi_t is the flow of xi, the omega_1 = Re(Omega) Hamilton field of Re H. Its
// (1,0) part is the holomorphic Hamilton field V of H with respect to Omega,
// so Phi_t is integrated as the real-time flow of the complex ODE
//
//   dz/dt = (1/s) dH/du,   du/dt = -(1/s) dH/dz,   Omega = s sum dz_j^du_j,
//
// optionally together with the real 4n x 4n variational equations.

#include <optional>

#include "hamflow/hamiltonian.hpp"

namespace hamflow {

enum class Method { rk4_fixed, rk45_adaptive };

struct IntegratorConfig {
  Method method = Method::rk45_adaptive;
  double step = 1e-3;  // rk4_fixed only
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  long max_steps = 200000;
  double max_horizon = 2.0;

  void validate() const;
};

struct FlowState {
  AmbientPoint point;
  /// d(point)/d(initial point) in the (Re z, Im z, Re u, Im u) layout, rows in
  /// the chart of `point`, columns in the chart of the initial point.
  std::optional<Matrix> jacobian;
  double time = 0.0;
  long steps = 0;
};

struct AmbientVector {
  CVector dz;
  CVector du;
};

/// Holomorphic Hamilton field V of H at p (its real part is xi).
AmbientVector xi_field(const HolomorphicHamiltonian& H, const AmbientPoint& p);

/// Complex derivative dV/d(z, u), 2n x 2n.
CMatrix xi_jacobian(const HolomorphicHamiltonian& H, const AmbientPoint& p);

/// xi at p in the real 4n layout.
Vector xi_real(const HolomorphicHamiltonian& H, const AmbientPoint& p);

FlowState flow(const HolomorphicHamiltonian& H, const AmbientPoint& p0, double t,
               const IntegratorConfig& cfg, bool with_jacobian);

/// Re-expresses a flow state in another chart, carrying the Jacobian rows.
FlowState to_chart(const ModelDescriptor& model, const FlowState& s, int chart);

/// || dPhi o I - I o dPhi || (operator norm), I = multiplication by i on X.
double holomorphy_defect(const Matrix& jacobian);

/// || J^T omega_1(end) J - omega_1(start) || for a flow Jacobian.
double symplecticity_defect(const ModelDescriptor& model, const AmbientPoint& start,
                            const FlowState& end);

}  // namespace hamflow
