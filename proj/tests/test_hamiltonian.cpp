#include <doctest.h>

#include <cmath>
#include <random>

#include "dropforge/hamiltonian.hpp"

using namespace dropforge;

TEST_CASE("hamiltonian values") {
  CHECK(hamiltonian(1.0, 0.0, ModelParams(2)) == 0.5);
  for (int n = 2; n <= 8; ++n) CHECK(hamiltonian(1.0, 0.0, ModelParams(n)) == 1.0 / n);
  CHECK(hamiltonian(2.0, 0.0, ModelParams(2)) == 0.0);
  CHECK_THROWS_AS(hamiltonian(0.0, 0.0, ModelParams(2)), DomainError);
}

TEST_CASE("gradient values") {
  for (int n : {2, 3, 7}) {
    const Vec2 g = grad_hamiltonian(1.0, 0.0, ModelParams(n));
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
  }
  const Vec2 g = grad_hamiltonian(2.0, 0.0, ModelParams(2));
  CHECK(g[0] == -1.0);
  CHECK(g[1] == 0.0);
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uR(0.2, 2.5), uT(-1.4, 1.4);
  const double h = 1e-5;
  for (int n : {2, 3, 5}) {
    const ModelParams p(n);
    for (int i = 0; i < 100; ++i) {
      const double R = uR(rng), th = uT(rng);
      const Vec2 g = grad_hamiltonian(R, th, p);
      const double fR = (hamiltonian(R + h, th, p) - hamiltonian(R - h, th, p)) / (2 * h);
      const double fT = (hamiltonian(R, th + h, p) - hamiltonian(R, th - h, p)) / (2 * h);
      CHECK(std::abs(g[0] - fR) <= 1e-6 * std::max(1.0, std::abs(g[0])));
      CHECK(std::abs(g[1] - fT) <= 1e-6 * std::max(1.0, std::abs(g[1])));
    }
  }
}

TEST_CASE("hessian at the equilibrium") {
  const Mat2 h2 = hessian_at_equilibrium(ModelParams(2));
  CHECK(h2[0][0] == -1.0);
  CHECK(h2[1][1] == -1.0);
  CHECK(h2[0][1] == 0.0);
  CHECK(h2[1][0] == 0.0);
  const Mat2 h4 = hessian_at_equilibrium(ModelParams(4));
  CHECK(h4[0][0] == -3.0);
  CHECK(h4[1][1] == -1.0);

  const double e = 1e-4;
  for (int n = 2; n <= 8; ++n) {
    const ModelParams p(n);
    const auto H = [&](double a, double b) { return hamiltonian(1.0 + a, b, p); };
    const double hRR = (H(e, 0) - 2 * H(0, 0) + H(-e, 0)) / (e * e);
    const double hTT = (H(0, e) - 2 * H(0, 0) + H(0, -e)) / (e * e);
    const double hRT = (H(e, e) - H(e, -e) - H(-e, e) + H(-e, -e)) / (4 * e * e);
    const Mat2 an = hessian_at_equilibrium(p);
    CHECK(std::abs(hRR - an[0][0]) <= 1e-5);
    CHECK(std::abs(hTT - an[1][1]) <= 1e-5);
    CHECK(std::abs(hRT - an[0][1]) <= 1e-5);
  }
}

TEST_CASE("limit field is tangent to the level sets of H") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uR(0.1, 3.0), uT(-1.5, 1.5);
  for (int n : {2, 3, 6}) {
    const ModelParams p(n);
    for (int i = 0; i < 500; ++i) {
      const double R = uR(rng), th = uT(rng);
      const Vec2 g = grad_hamiltonian(R, th, p);
      const Vec2 f = vector_field_limit(R, th, p);
      const double scale = std::hypot(g[0], g[1]) * std::hypot(f[0], f[1]);
      CHECK(std::abs(g[0] * f[0] + g[1] * f[1]) <= 1e-12 * std::max(scale, 1e-300));
    }
  }
}

TEST_CASE("equilibrium is a strict local maximum") {
  for (int n : {2, 3, 4}) {
    const ModelParams p(n);
    const double top = hamiltonian(1.0, 0.0, p);
    for (int i = -30; i <= 30; ++i) {
      for (int j = -30; j <= 30; ++j) {
        const double a = 0.01 * i, b = 0.01 * j;
        if ((i == 0 && j == 0) || std::hypot(a, b) > 0.3) continue;
        CHECK(top - hamiltonian(1.0 + a, b, p) > 0.0);
      }
    }
  }
}

TEST_CASE("drift rate values") {
  const ModelParams p(2);
  CHECK(hamiltonian_drift_rate({1.0, 0.0, 10.0}, p) == 0.0);
  CHECK(hamiltonian_drift_rate({2.0, 0.0, 1.0}, p) == -1.0);
  CHECK_THROWS_AS(hamiltonian_drift_rate({1.0, 0.0, 0.0}, p), DomainError);
}

TEST_CASE("drift rate matches differences of H along a rescaled trajectory") {
  for (int n : {2, 3}) {
    const ModelParams p(n);
    IntegratorConfig cfg;
    cfg.rel_tol = cfg.abs_tol = 1e-12;
    OutputRequest out;
    out.grid = linear_grid(10.0, 20.0, 2001);
    out.record_steps = false;
    const Trajectory t = integrate(rescaled_field(p), {1.1, 0.1}, 10.0, 20.0, cfg, out);
    REQUIRE(t.samples.size() == out.grid.size());
    const double dZ = out.grid[1] - out.grid[0];
    for (std::size_t i = 1; i + 1 < t.samples.size(); i += 20) {
      const Sample& a = t.samples[i - 1];
      const Sample& b = t.samples[i + 1];
      const double fd =
          (hamiltonian(b.y[0], b.y[1], p) - hamiltonian(a.y[0], a.y[1], p)) / (2.0 * dZ);
      const Sample& s = t.samples[i];
      const double rate = hamiltonian_drift_rate({s.y[0], s.y[1], s.x}, p);
      CHECK(std::abs(fd - rate) <= 1e-6);
    }
  }
}

TEST_CASE("epsilon terms vanish in the trivial cases") {
  const ModelParams p(2);
  const EpsilonTerms z = epsilon_terms(0.3, 1.2, 0.0, 0.0, 5.0, p);
  CHECK(z.eps_rho == 0.0);
  CHECK(z.eps_phi == 0.0);
  for (double th : {-1.0, 0.2, 0.7}) {
    for (double rho : {-0.3, 0.1, 0.5}) {
      CHECK(epsilon_terms(th, 1.0, rho, 0.0, 5.0, ModelParams(3)).eps_phi == 0.0);
    }
  }
}

TEST_CASE("epsilon terms reject states outside the domain") {
  const ModelParams p(2);
  CHECK_THROWS_AS(epsilon_terms(kHalfPi, 1.0, 0.0, 0.0, 1.0, p), DomainError);
  CHECK_THROWS_AS(epsilon_terms(1.0, 1.0, 0.0, 0.6, 1.0, p), DomainError);
  CHECK_THROWS_AS(epsilon_terms(0.0, 1.0, 0.0, 1.6, 1.0, p), DomainError);
  CHECK_THROWS_AS(epsilon_terms(0.0, 0.0, 0.0, 0.0, 1.0, p), DomainError);
  CHECK_THROWS_AS(epsilon_terms(0.0, 1.0, -1.0, 0.0, 1.0, p), DomainError);
  CHECK_THROWS_AS(epsilon_terms(0.0, 0.5, -0.6, 0.0, 1.0, p), DomainError);
  CHECK_THROWS_AS(epsilon_terms(0.0, 1.0, 0.0, 0.0, 0.0, p), DomainError);
}

TEST_CASE("epsilon terms close the difference equations of two solutions") {
  for (int n : {2, 3}) {
    const ModelParams p(n);
    IntegratorConfig cfg;
    cfg.rel_tol = cfg.abs_tol = 1e-12;
    cfg.max_step = 0.01;
    OutputRequest out;
    out.grid = linear_grid(20.0, 30.0, 10001);
    out.record_steps = false;
    const Trajectory a = integrate(rescaled_field(p), {1.0, 0.03}, 20.0, 30.0, cfg, out);
    const Trajectory b = integrate(rescaled_field(p), {1.05, 0.0}, 20.0, 30.0, cfg, out);
    const std::vector<DiffDiagnostics> d = difference_diagnostics(a, b, p);
    REQUIRE(d.size() == out.grid.size());
    const double dZ = out.grid[1] - out.grid[0];
    for (std::size_t i = 1; i + 1 < d.size(); i += 100) {
      const double drho = (d[i + 1].rho - d[i - 1].rho) / (2.0 * dZ);
      const double dphi = (d[i + 1].phi - d[i - 1].phi) / (2.0 * dZ);
      CHECK(std::abs(drho + std::tan(d[i].phi) - d[i].eps_rho) <= 1e-6);
      CHECK(std::abs(dphi - p.kappa() * (1.0 / std::cos(d[i].phi) - 1.0 / (1.0 + d[i].rho)) -
                     d[i].eps_phi) <= 1e-6);
    }
  }
}

TEST_CASE("diagnostics of a trajectory against itself") {
  const ModelParams p(3);
  OutputRequest out;
  out.grid = linear_grid(1.0, 5.0, 9);
  out.record_steps = false;
  const Trajectory eq = integrate(limit_field(p), {1.0, 0.0}, 1.0, 5.0, {}, out);
  for (const DiffDiagnostics& d : difference_diagnostics(eq, eq, p)) {
    CHECK(d.rho == 0.0);
    CHECK(d.phi == 0.0);
    CHECK(d.eps_rho == 0.0);
    CHECK(d.eps_phi == 0.0);
    CHECK(d.h == 1.0 / 3.0);
    CHECK(d.dh_dZ == 0.0);
  }
}

TEST_CASE("diagnostics use centered differences with one-sided ends") {
  const ModelParams p(2);
  Trajectory a, b;
  // rho = 0, phi grows; h = H(1, phi) = cos(phi) - 1/2.
  const double phis[] = {0.0, 0.1, 0.3, 0.4};
  for (int i = 0; i < 4; ++i) {
    a.samples.push_back({10.0 + i, {1.0, 0.0}});
    b.samples.push_back({10.0 + i, {1.0, phis[i]}});
  }
  const auto d = difference_diagnostics(a, b, p);
  const auto h = [](double phi) { return std::cos(phi) - 0.5; };
  CHECK(d[0].dh_dZ == doctest::Approx(h(0.1) - h(0.0)));
  CHECK(d[1].dh_dZ == doctest::Approx((h(0.3) - h(0.0)) / 2.0));
  CHECK(d[3].dh_dZ == doctest::Approx(h(0.4) - h(0.3)));
}

TEST_CASE("diagnostics reject mismatched grids") {
  const ModelParams p(2);
  Trajectory a, b;
  a.samples = {{1.0, {1.0, 0.0}}, {2.0, {1.0, 0.0}}};
  b.samples = {{1.0, {1.0, 0.0}}, {2.5, {1.0, 0.0}}};
  CHECK_THROWS_AS(difference_diagnostics(a, b, p), std::invalid_argument);
  b.samples = {{1.0, {1.0, 0.0}}};
  CHECK_THROWS_AS(difference_diagnostics(a, b, p), std::invalid_argument);
  // An early-terminated partner contributes its common prefix.
  b.samples = {{1.0, {1.0, 0.0}}, {2.0, {1.0, 0.1}}};
  a.samples.push_back({3.0, {1.0, 0.0}});
  CHECK(difference_diagnostics(a, b, p).size() == 2);
}
