#pragma once

// Residuals of the identities satisfied by phi_t, J_t, f_t and omega_t, and
// the report records they are collected into.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hamflow/leaf.hpp"

namespace hamflow {

/// Finite-difference steps in t and x.
inline constexpr double kTimeStep = 1e-5;
inline constexpr double kSpaceStep = 1e-5;

struct SamplePoint {
  int seed_id = 0;
  KahlerPoint x;
  double t = 0.0;
};

struct ResidualReport {
  std::string name;
  std::vector<SamplePoint> points;
  std::vector<double> residuals;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  /// Diagnostic reports are recorded but never fail a run.
  bool diagnostic = false;

  ResidualReport() = default;
  ResidualReport(std::string name, double tolerance, bool diagnostic = false);

  void add(const SamplePoint& p, double residual);
  /// Keeps points sorted by (seed_id, t) after merging partial reports.
  void merge(const ResidualReport& other);
};

/// Hamilton field of a real function on M with respect to a real symplectic
/// matrix W: solves W^T xi = df.
Vector hamilton_field(const Matrix& omega, const Vector& df);

/// Right side of the generator identity at y: Xi_{Re h} + J_t Xi_{Im h}.
Vector generator_rhs(const HolomorphicHamiltonian& H, const KahlerPoint& y, const Matrix& Jt);

/// || (phi_{t+d} - phi_{t-d}) / 2d - generator_rhs(phi_t(x)) ||.
double generator_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                          const SolverConfig& cfg);

/// Same velocity compared with d(Pi_t)_y (xi_y) (splitting route).
double cool_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                     const SolverConfig& cfg);

/// Generator identity of f_t against omega_t-Hamilton fields and J0.
double corollary_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                          const SolverConfig& cfg);

/// Chart derivative of phi_t at x by central differences.
Matrix dphi_finite_difference(const HolomorphicHamiltonian& H, const LeafSolution& sol,
                              const SolverConfig& cfg, double step = kSpaceStep);

/// || J_t dphi - dphi J0 || with dphi from central differences.
double holomorphy_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                           const SolverConfig& cfg);

/// || J_t^2 + 1 ||.
double complex_structure_residual(const Matrix& Jt);

/// || phi_{t+s}(x) - phi_t(phi_s(x)) ||; generally nonzero (diagnostic).
double group_defect(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t, double s,
                    const SolverConfig& cfg);

/// || omega(x) - df_t^T omega_t(f_t(x)) df_t ||.
double pullback_residual(const HolomorphicHamiltonian& H, const KahlerPoint& x, double t,
                         const SolverConfig& cfg);

nlohmann::json to_json(const KahlerPoint& x);
nlohmann::json to_json(const ResidualReport& r);
/// Flat CSV: name, seed_id, chart, re/im of x per dim, t, residual.
std::string to_csv(const std::vector<ResidualReport>& reports);

}  // namespace hamflow
