#include "dropforge/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dropforge {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// Fourth-order continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBoundaryResolution = 1e-3;

Vec2 axpy(const Vec2& y, double h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
  Vec2 out = y;
  for (int i = 0; i < 2; ++i) {
    double acc = 0.0;
    for (const auto& [c, k] : terms) acc += c * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

bool finite(const Vec2& v) { return std::isfinite(v[0]) && std::isfinite(v[1]); }

struct Dense {
  double x0 = 0.0, h = 0.0;
  Vec2 r0{}, r1{}, r2{}, r3{}, r4{};

  Vec2 operator()(double x) const {
    const double s = (x - x0) / h;
    const double s1 = 1.0 - s;
    Vec2 out{};
    for (int i = 0; i < 2; ++i) {
      out[i] = r0[i] + s * (r1[i] + s1 * (r2[i] + s * (r3[i] + s1 * r4[i])));
    }
    return out;
  }
};

class Stepper {
 public:
  Stepper(const VectorField& f, const IntegratorConfig& cfg, Trajectory& traj)
      : f_(f), cfg_(cfg), traj_(traj) {}

  Vec2 eval(double x, const Vec2& y) {
    ++traj_.evaluations;
    return f_.rhs(x, y);
  }

  double error_norm(const Vec2& y0, const Vec2& y1, const Vec2& err) const {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      const double q = err[i] / sc;
      acc += q * q;
    }
    return std::sqrt(acc / 2.0);
  }

  double initial_step(double x, const Vec2& y, const Vec2& f0, double dir, double span) {
    if (cfg_.initial_step > 0.0) return std::min(cfg_.initial_step, span);
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / 2.0);
    d1 = std::sqrt(d1 / 2.0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Vec2 y1{y[0] + dir * h0 * f0[0], y[1] + dir * h0 * f0[1]};
    const Vec2 f1 = eval(x + dir * h0, y1);
    double d2 = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(y[i]);
      const double q = (f1[i] - f0[i]) / sc;
      d2 += q * q;
    }
    d2 = finite(f1) ? std::sqrt(d2 / 2.0) / h0 : 1e300;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, cfg_.max_step, span});
  }

 private:
  const VectorField& f_;
  const IntegratorConfig& cfg_;
  Trajectory& traj_;
};

double event_value(const VectorField& f, const IntegratorConfig& cfg, const Vec2& y) {
  return std::min(y[0] - cfg.boundary_margin,
                  (f.theta_limit - cfg.boundary_margin) - std::abs(y[1]));
}

Termination classify_event(const IntegratorConfig& cfg, const Vec2& y) {
  return (y[0] - cfg.boundary_margin <= 0.0) ? Termination::RadiusVanish
                                              : Termination::ThetaBoundary;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("integrator tolerances must be positive");
  }
  if (!(boundary_margin > 0.0 && boundary_margin < 0.1)) {
    throw std::invalid_argument("boundary margin must lie in (0, 0.1)");
  }
  if (max_steps == 0) throw std::invalid_argument("step budget must be positive");
  if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
  if (initial_step < 0.0 || (!adaptive && !(initial_step > 0.0))) {
    throw std::invalid_argument("fixed-step integration needs a positive initial_step");
  }
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::SpanEnd: return "SpanEnd";
    case Termination::ThetaBoundary: return "ThetaBoundary";
    case Termination::RadiusVanish: return "RadiusVanish";
    case Termination::StepBudget: return "StepBudget";
    case Termination::StepUnderflow: return "StepUnderflow";
  }
  return "Unknown";
}

VectorField original_field(const ModelParams& p) {
  const double k = p.kappa();
  return {[k](double z, const Vec2& y) -> Vec2 {
            return {-std::tan(y[1]), k * (z / std::cos(y[1]) - 1.0 / y[0])};
          },
          kHalfPi, true};
}

VectorField rescaled_field(const ModelParams& p) {
  const double k = p.kappa();
  return {[k](double Z, const Vec2& y) -> Vec2 {
            return {-std::tan(y[1]) + y[0] / (2.0 * Z), k * (1.0 / std::cos(y[1]) - 1.0 / y[0])};
          },
          kHalfPi, true};
}

VectorField limit_field(const ModelParams& p) {
  const double k = p.kappa();
  return {[k](double, const Vec2& y) -> Vec2 {
            return {-std::tan(y[1]), k * (1.0 / std::cos(y[1]) - 1.0 / y[0])};
          },
          kHalfPi, false};
}

VectorField limit_t_field(const ModelParams& p) {
  const double k = p.kappa();
  return {[k](double, const Vec2& y) -> Vec2 {
            return {std::sin(y[1]), -k * (1.0 - std::cos(y[1]) / y[0])};
          },
          std::numbers::pi, false};
}

Trajectory integrate(const VectorField& field, const Vec2& initial, double start, double end,
                     const IntegratorConfig& cfg, const OutputRequest& out) {
  cfg.validate();
  if (!std::isfinite(start) || !std::isfinite(end) || start == end) {
    throw std::invalid_argument("integration span must be finite and non-empty");
  }
  if (field.requires_positive_variable && !(std::min(start, end) > 0.0)) {
    throw DomainError("integration span must stay at positive values of the independent variable");
  }
  if (!(initial[0] > 0.0) || !(std::abs(initial[1]) < field.theta_limit)) {
    throw DomainError("initial state outside the domain of the vector field");
  }

  const double dir = end > start ? 1.0 : -1.0;
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    const double g = out.grid[i];
    if (dir * (g - start) < 0.0 || dir * (end - g) < 0.0) {
      throw std::invalid_argument("output grid point outside the integration span");
    }
    if (i > 0 && !(dir * (g - out.grid[i - 1]) > 0.0)) {
      throw std::invalid_argument("output grid must be strictly monotone along the span");
    }
  }

  Trajectory traj;
  traj.forward = dir > 0.0;
  Stepper stepper(field, cfg, traj);

  std::size_t next_grid = 0;
  auto push = [&traj](double x, const Vec2& y) {
    if (!traj.samples.empty() && traj.samples.back().x == x) return;
    traj.samples.push_back({x, y});
  };

  double x = start;
  Vec2 y = initial;
  if (out.record_steps) push(x, y);
  while (next_grid < out.grid.size() && out.grid[next_grid] == start) {
    push(x, y);
    ++next_grid;
  }
  traj.end = {x, y};

  if (event_value(field, cfg, y) <= 0.0) {
    traj.termination = classify_event(cfg, y);
    return traj;
  }

  Vec2 k1 = stepper.eval(x, y);
  const double span = std::abs(end - start);
  double h = stepper.initial_step(x, y, k1, dir, span);
  bool last_rejected = false;

  while (true) {
    if (traj.accepted_steps + traj.rejected_steps >= cfg.max_steps) {
      traj.termination = Termination::StepBudget;
      break;
    }
    const double remaining = std::abs(end - x);
    double step = std::min({h, cfg.max_step, remaining});
    // Snap the final sliver onto the span end instead of taking a degenerate step.
    if (remaining - step < 16.0 * kEps * std::max(std::abs(end), 1.0)) step = remaining;
    if (step < 16.0 * kEps * std::max(std::abs(x), 1.0) && step < remaining) {
      // Near theta = +-pi/2 the distance to the boundary shrinks like the square
      // root of the remaining span, so at large |x| floating resolution runs out
      // before the margin is reached. That collapse is the boundary event.
      if (std::abs(y[1]) >= field.theta_limit - kBoundaryResolution) {
        traj.termination = Termination::ThetaBoundary;
      } else if (y[0] <= kBoundaryResolution) {
        traj.termination = Termination::RadiusVanish;
      } else {
        traj.termination = Termination::StepUnderflow;
      }
      break;
    }
    const double hs = dir * step;
    const double x1 = (step == remaining) ? end : x + hs;

    const Vec2 k2 = stepper.eval(x + c2 * hs, axpy(y, hs, {{a21, &k1}}));
    const Vec2 k3 = stepper.eval(x + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
    const Vec2 k4 = stepper.eval(x + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec2 k5 = stepper.eval(
        x + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec2 k6 = stepper.eval(
        x + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec2 y1 =
        axpy(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const Vec2 k7 = stepper.eval(x1, y1);

    bool ok = finite(y1) && finite(k7) && finite(k2) && finite(k3) && finite(k4) &&
              finite(k5) && finite(k6);
    double err = 0.0;
    if (ok && cfg.adaptive) {
      const Vec2 e =
          axpy({0.0, 0.0}, hs, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
      err = stepper.error_norm(y, y1, e);
      ok = std::isfinite(err) && err <= 1.0;
    }

    if (!ok) {
      ++traj.rejected_steps;
      if (!cfg.adaptive) {
        traj.termination = Termination::StepUnderflow;
        break;
      }
      const double fac = std::isfinite(err) && err > 0.0
                             ? std::max(kFacMin, kSafety * std::pow(err, -0.2))
                             : kFacMin;
      h = step * std::min(fac, 1.0);
      last_rejected = true;
      continue;
    }

    ++traj.accepted_steps;
    Dense dense;
    dense.x0 = x;
    dense.h = hs;
    dense.r0 = y;
    for (int i = 0; i < 2; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = hs * k1[i] - ydiff;
      dense.r1[i] = ydiff;
      dense.r2[i] = bspl;
      dense.r3[i] = ydiff - hs * k7[i] - bspl;
      dense.r4[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                          d7 * k7[i]);
    }

    double x_stop = x1;
    Vec2 y_stop = y1;
    const bool event = event_value(field, cfg, y1) <= 0.0;
    if (event) {
      // Bisection on the interpolant for the first point inside the margin.
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200 && (hi - lo) * step > 4.0 * kEps * std::max(std::abs(x), 1.0);
           ++it) {
        const double mid = 0.5 * (lo + hi);
        if (event_value(field, cfg, dense(x + mid * hs)) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (hi < 1.0) {
        x_stop = x + hi * hs;
        y_stop = dense(x_stop);
        if (event_value(field, cfg, y_stop) > 0.0) y_stop = y1, x_stop = x1;
      }
    }

    while (next_grid < out.grid.size() && dir * (out.grid[next_grid] - x_stop) <= 0.0) {
      const double g = out.grid[next_grid];
      push(g, g == x_stop ? y_stop : dense(g));
      ++next_grid;
    }
    if (out.record_steps) push(x_stop, y_stop);
    traj.end = {x_stop, y_stop};

    if (event) {
      traj.termination = classify_event(cfg, y_stop);
      break;
    }

    x = x1;
    y = y1;
    k1 = k7;
    if (x == end) {
      traj.termination = Termination::SpanEnd;
      break;
    }

    if (cfg.adaptive) {
      double fac = err > 0.0 ? kSafety * std::pow(err, -0.2) : kFacMax;
      fac = std::clamp(fac, kFacMin, last_rejected ? 1.0 : kFacMax);
      h = step * fac;
    } else {
      h = cfg.initial_step;
    }
    last_rejected = false;
  }
  return traj;
}

std::vector<double> linear_grid(double a, double b, std::size_t count) {
  if (count < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  g.back() = b;
  return g;
}

std::vector<double> log_grid(double a, double b, std::size_t count) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("log grid needs positive bounds");
  std::vector<double> g = linear_grid(std::log(a), std::log(b), count);
  for (double& v : g) v = std::exp(v);
  g.front() = a;
  g.back() = b;
  return g;
}

}  // namespace dropforge
