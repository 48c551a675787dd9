#pragma once

// Leaf intersection: phi_t(x) is the point where the transported leaf
// Phi_t({z = z_x}) meets the real locus. The leaf through x is parametrised by
// its fibre coordinate u, so phi_t(x) is found by Newton on
//
//   G(u) = U(t; z_x, u) - conj(Z(t; z_x, u)) = 0,
//
// a real 2n x 2n system (G is not complex differentiable because of conj).
// From the same variational data we get J_t (complex structure induced on TM
// by the splitting T_yX = T_yM + T(leaf)), the chart derivative of phi_t,
// f_t = Pi_0 o Phi_t o iota and omega_t defined by omega = f_t^* omega_t.

#include <optional>
#include <vector>

#include "hamflow/flow.hpp"

namespace hamflow {

struct NewtonConfig {
  double tol = 1e-10;
  int max_iters = 25;
  int max_halvings = 8;
  double max_condition = 1e10;

  void validate() const;
};

struct SolverConfig {
  IntegratorConfig integrator;
  NewtonConfig newton;
};

struct LeafSolution {
  KahlerPoint x;
  double t = 0.0;
  CVector u_star;
  KahlerPoint y;
  int newton_iters = 0;
  double residual = 0.0;
  /// Flow of (z_x, u_star) to time t, expressed in the chart of y.
  FlowState end;
};

struct FrameData {
  Matrix Jt;
  Matrix dphi;
  Matrix omega_t;
};

LeafSolution phi(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                 const SolverConfig& cfg, const std::optional<CVector>& warm_start = std::nullopt);

/// phi along a time grid with warm-started continuation. Throws LeafDegeneracy
/// (last good time attached) at the first time that cannot be reached.
std::vector<LeafSolution> phi_path(const HolomorphicHamiltonian& H, const KahlerPoint& x,
                                   const std::vector<double>& times, const SolverConfig& cfg);

/// Real anchor of the F_t-leaf through an ambient point.
KahlerPoint pi_t(const HolomorphicHamiltonian& H, const AmbientPoint& p, double t,
                 const SolverConfig& cfg);

/// J_t at y = phi_t(x) from a converged solution.
Matrix j_t(const LeafSolution& sol, const NewtonConfig& newton = {});
Matrix j_t(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
           const SolverConfig& cfg);

/// d(Pi_t)_y applied to real ambient vectors (columns of `v`, 4n rows).
Matrix leaf_projection(const LeafSolution& sol, const Matrix& v, const NewtonConfig& newton = {});

/// Chart derivative of phi_t at x by implicit differentiation of G.
Matrix dphi(const LeafSolution& sol);

FrameData frame(const HolomorphicHamiltonian& H, const LeafSolution& sol, const SolverConfig& cfg);

KahlerPoint f(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
              const SolverConfig& cfg);

struct MapWithJacobian {
  KahlerPoint y;
  Matrix jacobian;
};

/// f_t(x) with its chart derivative (rows in the chart of y, or in `chart` if given).
MapWithJacobian f_with_jacobian(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                                const SolverConfig& cfg, std::optional<int> chart = std::nullopt);

/// x with f_t(x) = y, by damped Newton shooting on x.
KahlerPoint f_inverse(const HolomorphicHamiltonian& H, const KahlerPoint& y, double t,
                      const SolverConfig& cfg,
                      const std::optional<KahlerPoint>& guess = std::nullopt);

/// omega_t(y) as a real 2n x 2n matrix.
Matrix omega_t(const HolomorphicHamiltonian& H, const KahlerPoint& y, double t,
               const SolverConfig& cfg);

/// Smallest eigenvalue of the symmetric part of omega(y) J_t; positive when
/// (omega, J_t) is a compatible pair at y.
double compatibility_min_eigenvalue(const ModelDescriptor& model, const KahlerPoint& y,
                                    const Matrix& Jt);

}  // namespace hamflow
