#include "dropforge/model.hpp"

#include <cmath>
#include <numbers>

namespace dropforge {

namespace {

void require_angle(double theta, double limit, const char* what) {
  if (!(std::abs(theta) < limit)) {
    throw DomainError(std::string(what) + ": theta outside the open interval (-" +
                      std::to_string(limit) + ", " + std::to_string(limit) + ")");
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

}  // namespace

ModelParams::ModelParams(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("dimension n must be at least 2");
}

void DropState::validate() const {
  require_positive(r, "r");
  require_angle(theta, kHalfPi, "drop state");
  require_positive(z, "z");
}

void RescaledState::validate() const {
  require_positive(R, "R");
  require_angle(theta, kHalfPi, "rescaled state");
  require_positive(Z, "Z");
}

Vec2 vector_field_original(const DropState& s, const ModelParams& p) {
  s.validate();
  return {-std::tan(s.theta), p.kappa() * (s.z / std::cos(s.theta) - 1.0 / s.r)};
}

Vec2 vector_field_rescaled(const RescaledState& s, const ModelParams& p) {
  s.validate();
  return {-std::tan(s.theta) + s.R / (2.0 * s.Z),
          p.kappa() * (1.0 / std::cos(s.theta) - 1.0 / s.R)};
}

Vec2 vector_field_limit(double R, double theta, const ModelParams& p) {
  require_positive(R, "R");
  require_angle(theta, kHalfPi, "limit field");
  return {-std::tan(theta), p.kappa() * (1.0 / std::cos(theta) - 1.0 / R)};
}

Vec2 vector_field_limit_t(double R, double theta, const ModelParams& p) {
  require_positive(R, "R");
  require_angle(theta, std::numbers::pi, "t-parameterized limit field");
  return {std::sin(theta), -p.kappa() * (1.0 - std::cos(theta) / R)};
}

RescaledState to_rescaled(const DropState& s) {
  require_positive(s.z, "z");
  return {s.z * s.r, s.theta, 0.5 * s.z * s.z};
}

DropState from_rescaled(const RescaledState& s) {
  require_positive(s.Z, "Z");
  const double z = std::sqrt(2.0 * s.Z);
  return {s.R / z, s.theta, z};
}

}  // namespace dropforge
