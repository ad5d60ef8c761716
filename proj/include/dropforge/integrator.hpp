#pragma once

// Adaptive Dormand-Prince 5(4) integrator with dense output and boundary events.
//
// States are two-component (radius-like, angle) pairs; the independent variable
// (z, Z or t) is carried separately, so one integrator serves every chart.

#include <cstddef>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "dropforge/model.hpp"

namespace dropforge {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects a step automatically
  double boundary_margin = 1e-6;
  std::size_t max_steps = 2'000'000;
  bool adaptive = true;  // false: fixed steps of size initial_step, no error control

  void validate() const;
};

enum class Termination { SpanEnd, ThetaBoundary, RadiusVanish, StepBudget, StepUnderflow };

std::string_view to_string(Termination t);

struct Sample {
  double x = 0.0;
  Vec2 y{};
};

struct Trajectory {
  std::vector<Sample> samples;
  Sample end;  // last state reached (span end or located event)
  Termination termination = Termination::SpanEnd;
  bool forward = true;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t evaluations = 0;
};

/// A right-hand side together with the domain it lives on. State layout is
/// y[0] = radius (r or R), y[1] = theta.
struct VectorField {
  std::function<Vec2(double, const Vec2&)> rhs;
  double theta_limit = kHalfPi;            // event when |theta| >= theta_limit - margin
  bool requires_positive_variable = false;  // the independent variable must stay > 0
};

VectorField original_field(const ModelParams& p);
VectorField rescaled_field(const ModelParams& p);
VectorField limit_field(const ModelParams& p);
VectorField limit_t_field(const ModelParams& p);

struct OutputRequest {
  /// Points of the independent variable where a dense-output sample is wanted,
  /// ordered in the direction of integration and inside the span.
  std::vector<double> grid;
  /// Also record the initial state and every accepted step.
  bool record_steps = true;
};

/// Integrates `field` from `initial` over [start, end] (start > end integrates
/// backward). Events and the step budget end the run normally; the cause is
/// stored in Trajectory::termination. Throws DomainError for an initial state
/// outside the domain and std::invalid_argument for a bad span or config.
Trajectory integrate(const VectorField& field, const Vec2& initial, double start, double end,
                     const IntegratorConfig& cfg = {}, const OutputRequest& out = {});

/// Evenly spaced grid from a to b inclusive (count >= 2).
std::vector<double> linear_grid(double a, double b, std::size_t count);
/// Logarithmically spaced grid from a to b inclusive; a, b > 0.
std::vector<double> log_grid(double a, double b, std::size_t count);

}  // namespace dropforge
