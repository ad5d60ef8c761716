#include "dropforge/phase.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dropforge/hamiltonian.hpp"
#include "dropforge/io.hpp"

namespace dropforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

double axis_value(double lo, double hi, int count, int i) {
  return count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
}

}  // namespace

void PhaseSpec::validate() const {
  if (nR < 1 || ntheta < 1) throw std::invalid_argument("phase grid needs at least one seed");
  if (!(R_min > 0.0) || R_max < R_min) throw std::invalid_argument("phase grid needs 0 < R_min <= R_max");
  if (theta_max < theta_min || !(theta_min > -kPi) || !(theta_max < kPi)) {
    throw std::invalid_argument("phase grid needs -pi < theta_min <= theta_max < pi");
  }
  if (!(t_span > 0.0)) throw std::invalid_argument("t span must be positive");
  if (contour_levels < 0) throw std::invalid_argument("contour level count must be non-negative");
  cfg.validate();
}

std::vector<Vec2> PhaseSpec::seeds() const {
  std::vector<Vec2> out;
  for (int j = 0; j < ntheta; ++j) {
    for (int i = 0; i < nR; ++i) {
      out.push_back({axis_value(R_min, R_max, nR, i), axis_value(theta_min, theta_max, ntheta, j)});
    }
  }
  return out;
}

std::vector<PhaseOrbit> phase_orbits(const PhaseSpec& spec) {
  spec.validate();
  const VectorField field = limit_t_field(spec.params);
  std::vector<PhaseOrbit> out;
  for (const Vec2& seed : spec.seeds()) {
    PhaseOrbit o;
    o.seed = seed;
    const Trajectory t = integrate(field, seed, 0.0, spec.t_span, spec.cfg);
    o.termination = t.termination;
    const double H0 = hamiltonian(seed[0], seed[1], spec.params);
    for (const Sample& s : t.samples) {
      o.points.push_back(s.y);
      o.max_H_deviation =
          std::max(o.max_H_deviation, std::abs(hamiltonian(s.y[0], s.y[1], spec.params) - H0));
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::string phase_svg(const PhaseSpec& spec, const std::vector<PhaseOrbit>& orbits) {
  double R_hi = std::max(2.0, spec.R_max);
  for (const PhaseOrbit& o : orbits) {
    for (const Vec2& q : o.points) R_hi = std::max(R_hi, q[0]);
  }
  R_hi = std::min(R_hi, 10.0) * 1.05;
  SvgDocument svg(0.0, R_hi, -kPi, kPi);

  if (spec.contour_levels > 0) {
    const auto H = [&](double R, double th) { return hamiltonian(std::max(R, 1e-9), th, spec.params); };
    const int nx = 160, ny = 160;
    double hmin = H(R_hi, 0.0);
    for (int j = 0; j <= ny; ++j) hmin = std::min(hmin, H(R_hi, -kPi + 2 * kPi * j / ny));
    const double hmax = 1.0 / spec.params.n();
    for (int l = 1; l <= spec.contour_levels; ++l) {
      const double level = hmin + (hmax - hmin) * l / (spec.contour_levels + 1);
      svg.segments(contour_segments(H, 0.0, R_hi, -kPi, kPi, nx, ny, level), "#bbbbbb");
    }
  }
  for (const PhaseOrbit& o : orbits) svg.polyline(o.points, "#1f4e9c");
  svg.circle({1.0, 0.0}, 3.0, "#c0392b");
  svg.text({0.02 * R_hi, 0.9 * kPi}, "n = " + std::to_string(spec.params.n()) + ", (R, theta)");
  return svg.str();
}

}  // namespace dropforge
