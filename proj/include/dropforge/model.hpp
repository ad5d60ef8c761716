#pragma once

// Axisymmetric capillary equation in three charts:
//   original  (r, theta) as functions of the depth z,
//   rescaled  (R, theta) as functions of Z, with (R, Z) = (z r, z^2 / 2),
//   limit     the autonomous system obtained from the rescaled one as Z -> inf.
// The capillary constant is normalized to n - 1 throughout.

#include <array>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dropforge {

using Vec2 = std::array<double, 2>;

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dimension count n of the hypersurface; kappa = n - 1 is implied and never stored.
class ModelParams {
 public:
  ModelParams() : n_(2) {}
  explicit ModelParams(int n);

  int n() const { return n_; }
  double kappa() const { return static_cast<double>(n_ - 1); }

 private:
  int n_;
};

struct DropState {
  double r = 1.0;
  double theta = 0.0;
  double z = 1.0;

  void validate() const;
};

struct RescaledState {
  double R = 1.0;
  double theta = 0.0;
  double Z = 1.0;

  void validate() const;
};

// Checked vector fields. Each throws DomainError outside the open domain.

/// (dr/dz, dtheta/dz) = (-tan theta, (n-1)(z / cos theta - 1 / r)).
Vec2 vector_field_original(const DropState& s, const ModelParams& p);

/// (dR/dZ, dtheta/dZ) = (-tan theta + R / (2Z), (n-1)(1 / cos theta - 1 / R)).
Vec2 vector_field_rescaled(const RescaledState& s, const ModelParams& p);

/// The Z -> inf limit of the rescaled field: (-tan theta, (n-1)(1 / cos theta - 1 / R)).
Vec2 vector_field_limit(double R, double theta, const ModelParams& p);

/// Limit field in the time variable t with dZ = -cos(theta) dt. Regular at
/// theta = +-pi/2, defined for theta in (-pi, pi).
Vec2 vector_field_limit_t(double R, double theta, const ModelParams& p);

RescaledState to_rescaled(const DropState& s);
DropState from_rescaled(const RescaledState& s);

}  // namespace dropforge
