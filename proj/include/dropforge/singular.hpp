#pragma once

// The infinite-length pendent drop: backward integration from an expansion
// seed, an independent forward-shooting solver, order-by-order matching with the
// formal series, and finite drops for contrast.

#include <cstddef>
#include <utility>
#include <vector>

#include "dropforge/hamiltonian.hpp"
#include "dropforge/integrator.hpp"
#include "dropforge/model.hpp"
#include "dropforge/series.hpp"

namespace dropforge {

struct SingularSolveSpec {
  ModelParams params;
  double Z_start = 1000.0;
  double Z_end = 1.0;
  std::size_t seed_order = 4;
  IntegratorConfig cfg;
  OutputRequest output;

  void validate() const;
};

/// (R, theta) of the order-`order` partial sums of the formal solution at Z.
Vec2 expansion_seed(const ModelParams& p, std::size_t order, double Z);

/// Seeds the rescaled field at Z_start from the formal expansion and integrates
/// backward to Z_end. Nearby solutions separate forward in Z, so the backward
/// pass contracts seed and step errors. Samples are (Z, (R, theta)).
Trajectory singular_solution(const SingularSolveSpec& spec);

struct ShootingOptions {
  double Z_match = 0.0;  // 0: max(10 Z_probe, 200)
  std::size_t match_order = 8;
  std::size_t max_iterations = 40;
  double fd_step = 1e-7;
};

struct ShootingResult {
  double R = 0.0;
  double theta = 0.0;
  double Z_match = 0.0;
  double residual = 0.0;  // |state(Z_match) - expansion(Z_match)|_inf
  std::size_t iterations = 0;
};

/// Forward shooting: finds (R, theta) at Z_probe whose forward trajectory meets
/// the formal expansion at Z_match, by damped Newton iteration with a
/// finite-difference Jacobian. R must stay inside `bracket`. Independent of
/// singular_solution, which integrates in the opposite direction.
/// Throws std::invalid_argument for a bad bracket, std::runtime_error when the
/// iteration budget is exhausted.
ShootingResult shooting_cross_check(const ModelParams& p, double Z_probe,
                                    std::pair<double, double> bracket,
                                    const IntegratorConfig& cfg = {},
                                    const ShootingOptions& opts = {});

struct MatchOptions {
  double Z_lo = 100.0;
  double Z_hi = 1000.0;
  double floor = 1e-12;  // truncation errors below this anywhere in the window are not fitted
};

struct ComponentMatch {
  double slope = 0.0;
  int expected_slope = 0;  // minus the index of the next nonzero coefficient
  bool floor_limited = false;
  double min_error = 0.0;
  double max_error = 0.0;
};

struct MatchReport {
  std::size_t order = 0;
  ComponentMatch R;
  ComponentMatch theta;
  std::size_t points = 0;
  double max_zr_deviation = 0.0;  // max |z r - 1| = max |R - 1| over the window
};

/// Least-squares slope of log |solution - partial sum through k| against log Z
/// over the window, for k = 0..k_max. Needs >= 20 samples spanning a decade
/// and fs.order() >= k_max + 2.
std::vector<MatchReport> matching_orders(const Trajectory& traj, const FormalSolution& fs,
                                         std::size_t k_max, const MatchOptions& opts = {});

struct FirstOrderReport {
  double sup_R_dev = 0.0;      // sup Z |R - 1|
  double sup_theta_dev = 0.0;  // sup Z |theta - 1/(2Z)|
  std::vector<std::pair<double, Vec2>> profile;  // (Z, (Z|R-1|, Z|theta - 1/(2Z)|))
};

/// First-order deviations over all samples. Throws std::invalid_argument if the
/// sampled Z range spans less than a factor 10.
FirstOrderReport first_order_check(const Trajectory& traj);

struct DropProfile {
  Trajectory original;            // samples (z, (r, theta))
  std::vector<Sample> rescaled;   // samples (Z, (R, theta))
};

/// Original-variable state of the singular solution at depth z, from a
/// default backward solve with the given integrator settings.
DropState singular_state_at_depth(const ModelParams& p, double z, const IntegratorConfig& cfg = {});

/// Forward integration of the original field from `initial` to z_end or the
/// first boundary event.
DropProfile finite_drop_profile(const ModelParams& p, const DropState& initial, double z_end,
                                const IntegratorConfig& cfg = {});

/// Number of sign changes of theta along the samples (nodes of the profile).
std::size_t count_theta_sign_changes(const std::vector<Sample>& samples);

struct Crossing {
  double Z = 0.0;
  double R = 0.0;
  double H = 0.0;
};

struct DivergeSpec {
  ModelParams params;
  double Z0 = 10.0;
  double Z_end = 200.0;
  double offset = 1e-4;
  bool offset_in_theta = true;  // false: offset applied to R
  std::size_t grid_points = 761;
  IntegratorConfig cfg;
};

struct DivergeResult {
  Vec2 singular_state{};  // (R, theta) at Z0
  Trajectory minus;       // singular state - offset, the reference of the pair
  Trajectory plus;        // singular state + offset
  std::vector<DiffDiagnostics> diagnostics;
  double max_h = 0.0;
  double threshold_Z = 0.0;  // first grid Z from which dh/dZ <= 0 to the end; NaN if none
};

/// Two forward runs from the singular state at Z0 shifted by -offset and
/// +offset, compared on a uniform common grid of Z0..Z_end. Throws
/// std::invalid_argument for a zero offset or a shifted state outside the domain.
DivergeResult diverge_experiment(const DivergeSpec& spec);

/// Upward zero crossings of theta (negative to positive), located by linear
/// interpolation, with H evaluated at the crossing.
std::vector<Crossing> upward_theta_crossings(const std::vector<Sample>& rescaled,
                                             const ModelParams& p);

/// Samples of a rescaled trajectory mapped to original variables (z, (r, theta)).
std::vector<Sample> to_original_samples(const std::vector<Sample>& rescaled);

}  // namespace dropforge
