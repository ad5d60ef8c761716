#pragma once

// Phase portraits of the limit system in the regularized time t.

#include <string>
#include <vector>

#include "dropforge/integrator.hpp"
#include "dropforge/model.hpp"

namespace dropforge {

struct PhaseSpec {
  ModelParams params;
  double R_min = 0.5;
  double R_max = 1.5;
  double theta_min = -1.0;
  double theta_max = 1.0;
  int nR = 5;
  int ntheta = 5;
  double t_span = 20.0;
  int contour_levels = 0;  // H level sets drawn by marching squares
  IntegratorConfig cfg;

  /// Throws std::invalid_argument for an empty grid or a seed outside R > 0, |theta| < pi.
  void validate() const;
  /// Seeds in row-major order (theta outer). A count of 1 uses the lower bound.
  std::vector<Vec2> seeds() const;
};

struct PhaseOrbit {
  Vec2 seed{};
  std::vector<Vec2> points;
  Termination termination = Termination::SpanEnd;
  double max_H_deviation = 0.0;  // max |H - H(seed)| along the orbit
};

std::vector<PhaseOrbit> phase_orbits(const PhaseSpec& spec);

/// SVG with one polyline per orbit, the equilibrium (1, 0) marked and
/// optional H contours.
std::string phase_svg(const PhaseSpec& spec, const std::vector<PhaseOrbit>& orbits);

}  // namespace dropforge
