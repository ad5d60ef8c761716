#pragma once

#include <array>
#include <vector>

#include "dropforge/integrator.hpp"
#include "dropforge/model.hpp"

namespace dropforge {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// H(R, theta) = R^(n-1) (cos theta - (n-1) R / n), conserved by the limit field
/// and maximal (= 1/n) at the elliptic equilibrium (1, 0).
double hamiltonian(double R, double theta, const ModelParams& p);

/// (dH/dR, dH/dtheta) = ((n-1) R^(n-2) (cos theta - R), -R^(n-1) sin theta).
Vec2 grad_hamiltonian(double R, double theta, const ModelParams& p);

/// Hessian of H at (1, 0): diag(-(n-1), -1).
Mat2 hessian_at_equilibrium(const ModelParams& p);

/// Exact dH/dZ along the full rescaled field: dH/dR * R / (2Z).
double hamiltonian_drift_rate(const RescaledState& s, const ModelParams& p);

struct EpsilonTerms {
  double eps_rho = 0.0;
  double eps_phi = 0.0;
};

/// Departure of the difference (rho, phi) = (R~ - R, theta~ - theta) of two
/// solutions of the rescaled field from the limit dynamics of (1 + rho, phi):
///   d rho / dZ = -tan phi + eps_rho,
///   d phi / dZ = (n-1)(1 / cos phi - 1 / (1 + rho)) + eps_phi.
/// (R, theta) is the reference solution at depth Z.
EpsilonTerms epsilon_terms(double theta, double R, double rho, double phi, double Z,
                           const ModelParams& p);

struct DiffDiagnostics {
  double Z = 0.0;
  double R = 0.0;      // reference trajectory
  double theta = 0.0;  // reference trajectory
  double rho = 0.0;
  double phi = 0.0;
  double h = 0.0;  // H(1 + rho, phi)
  double eps_rho = 0.0;
  double eps_phi = 0.0;
  double dh_dZ = 0.0;  // finite differences of h on the grid
};

/// Per-grid-point diagnostics of `other` relative to `reference`. Both must be
/// rescaled-field trajectories sampled on the same Z grid; when one stopped
/// early only the common prefix is used. dh/dZ uses centered differences
/// (one-sided at the ends). Throws std::invalid_argument on grid mismatch or
/// fewer than two common points.
std::vector<DiffDiagnostics> difference_diagnostics(const Trajectory& reference,
                                                    const Trajectory& other,
                                                    const ModelParams& p);

}  // namespace dropforge
