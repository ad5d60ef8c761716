#include "dropforge/singular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>

#include "dropforge/hamiltonian.hpp"

namespace dropforge {

void SingularSolveSpec::validate() const {
  if (!(Z_end > 0.0) || !(Z_start > Z_end)) {
    throw std::invalid_argument("singular solve needs Z_start > Z_end > 0");
  }
  if (seed_order < 1) throw std::invalid_argument("seed order must be at least 1");
  cfg.validate();
}

Vec2 expansion_seed(const ModelParams& p, std::size_t order, double Z) {
  const FormalSolution fs = expansion_coefficients(p, order);
  const Vec2 seed = evaluate_expansion(fs, order, Z);
  if (!(seed[0] > 0.0) || !(std::abs(seed[1]) < kHalfPi)) {
    throw DomainError("expansion seed lies outside the domain; increase Z_start");
  }
  return seed;
}

Trajectory singular_solution(const SingularSolveSpec& spec) {
  spec.validate();
  const Vec2 seed = expansion_seed(spec.params, spec.seed_order, spec.Z_start);
  return integrate(rescaled_field(spec.params), seed, spec.Z_start, spec.Z_end, spec.cfg,
                   spec.output);
}

namespace {

struct ForwardMiss {
  bool reached = false;
  Vec2 miss{};
};

ForwardMiss forward_miss(const VectorField& field, const Vec2& start, double Z_probe,
                         double Z_match, const Vec2& target, const IntegratorConfig& cfg) {
  if (!(start[0] > 0.0) || !(std::abs(start[1]) < kHalfPi)) return {};
  OutputRequest out;
  out.record_steps = false;
  const Trajectory t = integrate(field, start, Z_probe, Z_match, cfg, out);
  if (t.termination != Termination::SpanEnd) return {};
  return {true, {t.end.y[0] - target[0], t.end.y[1] - target[1]}};
}

double inf_norm(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

}  // namespace

ShootingResult shooting_cross_check(const ModelParams& p, double Z_probe,
                                    std::pair<double, double> bracket,
                                    const IntegratorConfig& cfg, const ShootingOptions& opts) {
  const auto [R_lo, R_hi] = bracket;
  if (!(R_lo > 0.0) || !(R_hi > R_lo)) throw std::invalid_argument("bad shooting bracket");
  if (!(Z_probe > 0.0)) throw std::invalid_argument("Z_probe must be positive");
  cfg.validate();

  const double Z_match = opts.Z_match > 0.0 ? opts.Z_match : std::max(10.0 * Z_probe, 200.0);
  if (!(Z_match > Z_probe)) throw std::invalid_argument("matching depth must exceed Z_probe");

  const FormalSolution fs = expansion_coefficients(p, opts.match_order);
  const Vec2 target = evaluate_expansion(fs, opts.match_order, Z_match);
  const VectorField field = rescaled_field(p);

  // First-order approximation at Z_probe as the starting guess.
  Vec2 x{std::clamp(1.0, R_lo, R_hi), 0.5 / Z_probe};
  ForwardMiss fx = forward_miss(field, x, Z_probe, Z_match, target, cfg);
  if (!fx.reached) throw std::runtime_error("shooting start does not reach the matching depth");

  const double tol = std::max(cfg.abs_tol, 1e-13);
  ShootingResult res;
  res.Z_match = Z_match;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    res.iterations = it;
    double jac[2][2];
    for (int j = 0; j < 2; ++j) {
      Vec2 xp = x, xm = x;
      xp[j] += opts.fd_step;
      xm[j] -= opts.fd_step;
      const ForwardMiss fp = forward_miss(field, xp, Z_probe, Z_match, target, cfg);
      const ForwardMiss fm = forward_miss(field, xm, Z_probe, Z_match, target, cfg);
      if (!fp.reached || !fm.reached) {
        throw std::runtime_error("shooting Jacobian probe left the domain");
      }
      for (int i = 0; i < 2; ++i) jac[i][j] = (fp.miss[i] - fm.miss[i]) / (2.0 * opts.fd_step);
    }
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if (det == 0.0 || !std::isfinite(det)) throw std::runtime_error("singular shooting Jacobian");
    const Vec2 dx{-(jac[1][1] * fx.miss[0] - jac[0][1] * fx.miss[1]) / det,
                  -(-jac[1][0] * fx.miss[0] + jac[0][0] * fx.miss[1]) / det};

    // Damped update: halve until the miss decreases and the run still reaches Z_match.
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      const Vec2 trial{x[0] + lambda * dx[0], x[1] + lambda * dx[1]};
      const ForwardMiss ft = forward_miss(field, trial, Z_probe, Z_match, target, cfg);
      if (ft.reached && inf_norm(ft.miss) < inf_norm(fx.miss)) {
        x = trial;
        fx = ft;
        improved = true;
        break;
      }
    }
    if (x[0] < R_lo || x[0] > R_hi) {
      throw std::runtime_error("shooting iterate left the R bracket");
    }
    res.R = x[0];
    res.theta = x[1];
    res.residual = inf_norm(fx.miss);
    if (!improved || lambda * inf_norm(dx) < tol) return res;
  }
  throw std::runtime_error("shooting iteration budget exhausted");
}

namespace {

int next_nonzero_index(const PowerSeries& s, std::size_t k) {
  for (std::size_t j = k + 1; j <= s.order(); ++j) {
    if (s[j] != 0) return static_cast<int>(j);
  }
  throw std::invalid_argument("formal solution too short to predict the next order");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ComponentMatch match_component(const std::vector<double>& logZ, const std::vector<double>& err,
                               int expected, double floor) {
  ComponentMatch c;
  c.expected_slope = expected;
  c.min_error = *std::min_element(err.begin(), err.end());
  c.max_error = *std::max_element(err.begin(), err.end());
  c.floor_limited = c.min_error < floor;
  if (!c.floor_limited) {
    std::vector<double> logE(err.size());
    std::transform(err.begin(), err.end(), logE.begin(), [](double e) { return std::log(e); });
    c.slope = fit_slope(logZ, logE);
  }
  return c;
}

}  // namespace

std::vector<MatchReport> matching_orders(const Trajectory& traj, const FormalSolution& fs,
                                         std::size_t k_max, const MatchOptions& opts) {
  if (fs.order() < k_max + 2) {
    throw std::invalid_argument("formal solution order must be at least k_max + 2");
  }
  std::vector<const Sample*> window;
  for (const Sample& s : traj.samples) {
    if (s.x >= opts.Z_lo && s.x <= opts.Z_hi) window.push_back(&s);
  }
  if (window.size() < 20) throw std::invalid_argument("matching needs at least 20 samples in the window");
  double zmin = window.front()->x, zmax = zmin;
  for (const Sample* s : window) {
    zmin = std::min(zmin, s->x);
    zmax = std::max(zmax, s->x);
  }
  if (zmax < 10.0 * zmin * (1.0 - 1e-12)) {
    throw std::invalid_argument("matching window samples must span at least one decade");
  }

  std::vector<double> logZ;
  double max_zr = 0.0;
  for (const Sample* s : window) {
    logZ.push_back(std::log(s->x));
    max_zr = std::max(max_zr, std::abs(s->y[0] - 1.0));
  }

  std::vector<MatchReport> reports;
  for (std::size_t k = 0; k <= k_max; ++k) {
    std::vector<double> eR, eT;
    for (const Sample* s : window) {
      const Vec2 e = evaluate_expansion(fs, k, s->x);
      eR.push_back(std::abs(s->y[0] - e[0]));
      eT.push_back(std::abs(s->y[1] - e[1]));
    }
    MatchReport r;
    r.order = k;
    r.points = window.size();
    r.max_zr_deviation = max_zr;
    r.R = match_component(logZ, eR, -next_nonzero_index(fs.R, k), opts.floor);
    r.theta = match_component(logZ, eT, -next_nonzero_index(fs.theta, k), opts.floor);
    reports.push_back(r);
  }
  return reports;
}

FirstOrderReport first_order_check(const Trajectory& traj) {
  if (traj.samples.size() < 2) throw std::invalid_argument("first-order check needs samples");
  double zmin = traj.samples.front().x, zmax = zmin;
  for (const Sample& s : traj.samples) {
    zmin = std::min(zmin, s.x);
    zmax = std::max(zmax, s.x);
  }
  if (!(zmin > 0.0) || zmax < 10.0 * zmin * (1.0 - 1e-12)) {
    throw std::invalid_argument("first-order check needs a Z span of at least one decade");
  }
  FirstOrderReport rep;
  for (const Sample& s : traj.samples) {
    const double Z = s.x;
    const Vec2 dev{Z * std::abs(s.y[0] - 1.0), Z * std::abs(s.y[1] - 0.5 / Z)};
    rep.sup_R_dev = std::max(rep.sup_R_dev, dev[0]);
    rep.sup_theta_dev = std::max(rep.sup_theta_dev, dev[1]);
    rep.profile.emplace_back(Z, dev);
  }
  return rep;
}

DropState singular_state_at_depth(const ModelParams& p, double z, const IntegratorConfig& cfg) {
  if (!(z > 0.0)) throw std::invalid_argument("depth must be positive");
  SingularSolveSpec spec;
  spec.params = p;
  spec.Z_end = 0.5 * z * z;
  spec.cfg = cfg;
  spec.output.record_steps = false;
  const Trajectory t = singular_solution(spec);
  if (t.termination != Termination::SpanEnd) {
    throw std::runtime_error("singular solution terminated before depth " + std::to_string(z) +
                             ": " + std::string(to_string(t.termination)));
  }
  return from_rescaled({t.end.y[0], t.end.y[1], t.end.x});
}

DivergeResult diverge_experiment(const DivergeSpec& spec) {
  if (spec.offset == 0.0 || !std::isfinite(spec.offset)) {
    throw std::invalid_argument("offset must be nonzero");
  }
  if (!(spec.Z0 > 0.0) || !(spec.Z_end > spec.Z0)) {
    throw std::invalid_argument("diverge needs Z_end > Z0 > 0");
  }
  if (spec.grid_points < 3) throw std::invalid_argument("diverge grid needs at least 3 points");

  DivergeResult res;
  SingularSolveSpec ss;
  ss.params = spec.params;
  ss.Z_start = std::max(1000.0, 10.0 * spec.Z0);
  ss.Z_end = spec.Z0;
  ss.cfg = spec.cfg;
  ss.output.record_steps = false;
  const Trajectory back = singular_solution(ss);
  if (back.termination != Termination::SpanEnd) {
    throw std::runtime_error("singular solution did not reach Z0");
  }
  res.singular_state = back.end.y;

  const int c = spec.offset_in_theta ? 1 : 0;
  Vec2 lo = res.singular_state, hi = res.singular_state;
  lo[c] -= spec.offset;
  hi[c] += spec.offset;
  for (const Vec2& s : {lo, hi}) {
    if (!(s[0] > 0.0) || !(std::abs(s[1]) < kHalfPi)) {
      throw std::invalid_argument("offset moves the perturbed state outside the domain");
    }
  }

  OutputRequest out;
  out.record_steps = false;
  out.grid = linear_grid(spec.Z0, spec.Z_end, spec.grid_points);
  const VectorField field = rescaled_field(spec.params);
  res.minus = integrate(field, lo, spec.Z0, spec.Z_end, spec.cfg, out);
  res.plus = integrate(field, hi, spec.Z0, spec.Z_end, spec.cfg, out);
  res.diagnostics = difference_diagnostics(res.minus, res.plus, spec.params);

  res.max_h = -std::numeric_limits<double>::infinity();
  for (const DiffDiagnostics& d : res.diagnostics) res.max_h = std::max(res.max_h, d.h);
  res.threshold_Z = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = res.diagnostics.size(); i-- > 0;) {
    if (res.diagnostics[i].dh_dZ > 0.0) break;
    res.threshold_Z = res.diagnostics[i].Z;
  }
  return res;
}

DropProfile finite_drop_profile(const ModelParams& p, const DropState& initial, double z_end,
                                const IntegratorConfig& cfg) {
  initial.validate();
  if (!(z_end > initial.z)) throw std::invalid_argument("z_end must exceed the initial depth");
  DropProfile prof;
  prof.original = integrate(original_field(p), {initial.r, initial.theta}, initial.z, z_end, cfg);
  for (const Sample& s : prof.original.samples) {
    const RescaledState rs = to_rescaled({s.y[0], s.y[1], s.x});
    prof.rescaled.push_back({rs.Z, {rs.R, rs.theta}});
  }
  return prof;
}

std::size_t count_theta_sign_changes(const std::vector<Sample>& samples) {
  std::size_t changes = 0;
  int last = 0;
  for (const Sample& s : samples) {
    const int sign = s.y[1] > 0.0 ? 1 : (s.y[1] < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last != 0 && sign != last) ++changes;
    last = sign;
  }
  return changes;
}

std::vector<Crossing> upward_theta_crossings(const std::vector<Sample>& rescaled,
                                             const ModelParams& p) {
  // Zeros are skipped the same way count_theta_sign_changes skips them.
  std::vector<Crossing> out;
  bool below = false;
  std::size_t last_neg = 0;
  for (std::size_t i = 0; i < rescaled.size(); ++i) {
    const double th = rescaled[i].y[1];
    if (th < 0.0) {
      below = true;
      last_neg = i;
    } else if (th > 0.0) {
      if (below) {
        const Sample& a = rescaled[last_neg];
        const Sample& b = rescaled[last_neg + 1];
        const double w = b.y[1] == 0.0 ? 1.0 : a.y[1] / (a.y[1] - b.y[1]);
        Crossing c;
        c.Z = a.x + w * (b.x - a.x);
        c.R = a.y[0] + w * (b.y[0] - a.y[0]);
        c.H = hamiltonian(c.R, 0.0, p);
        out.push_back(c);
      }
      below = false;
    }
  }
  return out;
}

std::vector<Sample> to_original_samples(const std::vector<Sample>& rescaled) {
  std::vector<Sample> out;
  out.reserve(rescaled.size());
  for (const Sample& s : rescaled) {
    const DropState d = from_rescaled({s.y[0], s.y[1], s.x});
    out.push_back({d.z, {d.r, d.theta}});
  }
  return out;
}

}  // namespace dropforge
