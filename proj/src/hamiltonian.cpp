#include "dropforge/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace dropforge {

namespace {

void require_positive_radius(double R) {
  if (!(R > 0.0)) throw DomainError("radius must be positive");
}

void require_open_angle(double a, const char* what) {
  if (!(std::abs(a) < kHalfPi)) {
    throw DomainError(std::string(what) + " must lie in (-pi/2, pi/2)");
  }
}

}  // namespace

double hamiltonian(double R, double theta, const ModelParams& p) {
  require_positive_radius(R);
  const int n = p.n();
  // Dividing by n last keeps H(1, 0) = 1/n exact in floating point.
  return std::pow(R, n - 1) * (n * std::cos(theta) - p.kappa() * R) / n;
}

Vec2 grad_hamiltonian(double R, double theta, const ModelParams& p) {
  require_positive_radius(R);
  const int n = p.n();
  return {p.kappa() * std::pow(R, n - 2) * (std::cos(theta) - R),
          -std::pow(R, n - 1) * std::sin(theta)};
}

Mat2 hessian_at_equilibrium(const ModelParams& p) {
  return {{{-p.kappa(), 0.0}, {0.0, -1.0}}};
}

double hamiltonian_drift_rate(const RescaledState& s, const ModelParams& p) {
  s.validate();
  return grad_hamiltonian(s.R, s.theta, p)[0] * s.R / (2.0 * s.Z);
}

EpsilonTerms epsilon_terms(double theta, double R, double rho, double phi, double Z,
                           const ModelParams& p) {
  require_open_angle(theta, "theta");
  require_open_angle(phi, "phi");
  require_open_angle(theta + phi, "theta + phi");
  require_positive_radius(R);
  require_positive_radius(R + rho);
  require_positive_radius(1.0 + rho);
  if (!(Z > 0.0)) throw DomainError("Z must be positive");

  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double ctp = std::cos(theta + phi);

  EpsilonTerms e;
  e.eps_rho = rho / (2.0 * Z) - std::tan(phi) * std::tan(theta) * std::tan(theta + phi);
  e.eps_phi = p.kappa() * (sp * st / (ct * ctp) +
                           ((1.0 - cp) / ctp) * ((1.0 - ct) + sp * st / cp) +
                           rho * (1.0 - R) * (1.0 + R + rho) / (R * (R + rho) * (1.0 + rho)));
  return e;
}

std::vector<DiffDiagnostics> difference_diagnostics(const Trajectory& reference,
                                                    const Trajectory& other,
                                                    const ModelParams& p) {
  const std::size_t m = std::min(reference.samples.size(), other.samples.size());
  if (m < 2) throw std::invalid_argument("difference diagnostics need at least two common points");

  std::vector<DiffDiagnostics> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Sample& a = reference.samples[i];
    const Sample& b = other.samples[i];
    if (a.x != b.x) throw std::invalid_argument("trajectories are not sampled on a common grid");
    DiffDiagnostics& d = out[i];
    d.Z = a.x;
    d.R = a.y[0];
    d.theta = a.y[1];
    d.rho = b.y[0] - a.y[0];
    d.phi = b.y[1] - a.y[1];
    d.h = hamiltonian(1.0 + d.rho, d.phi, p);
    const EpsilonTerms e = epsilon_terms(d.theta, d.R, d.rho, d.phi, d.Z, p);
    d.eps_rho = e.eps_rho;
    d.eps_phi = e.eps_phi;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == m ? i : i + 1;
    out[i].dh_dZ = (out[hi].h - out[lo].h) / (out[hi].Z - out[lo].Z);
  }
  return out;
}

}  // namespace dropforge
