#include <doctest.h>

#include <cmath>
#include <random>

#include "dropforge/series.hpp"

using namespace dropforge;

namespace {

PowerSeries series(std::initializer_list<Rational> c) { return PowerSeries(std::vector<Rational>(c)); }

PowerSeries random_series(std::mt19937_64& rng, std::size_t K, bool nonzero_constant) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  PowerSeries s = PowerSeries::zero(K);
  for (std::size_t k = 0; k <= K; ++k) s[k] = Rational(num(rng), den(rng));
  if (nonzero_constant && s[0] == 0) s[0] = 1;
  return s;
}

}  // namespace

TEST_CASE("series arithmetic examples") {
  CHECK(series({1, 1}) + series({1, -1}) == series({2, 0}));
  CHECK(series({1, 1, 0}) * series({1, -1, 0}) == series({1, 0, -1}));
  CHECK(series({1, 1}) - series({1, 1}) == series({0, 0}));
  CHECK(series_scale(series({1, 2}), Rational(1, 2)) == series({Rational(1, 2), 1}));
}

TEST_CASE("binary operations truncate to the smaller order") {
  const PowerSeries a = series({1, 1, 1, 1});
  const PowerSeries b = series({1, 1});
  CHECK((a + b).order() == 1);
  CHECK((a * b) == series({1, 2}));
  CHECK_THROWS_AS(b.truncated(2), std::invalid_argument);
  CHECK_THROWS_AS(PowerSeries(std::vector<Rational>{}), std::invalid_argument);
}

TEST_CASE("multiplication is commutative and associative") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const PowerSeries a = random_series(rng, 6, false);
    const PowerSeries b = random_series(rng, 6, false);
    const PowerSeries c = random_series(rng, 6, false);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
  }
}

TEST_CASE("reciprocal") {
  CHECK(series_reciprocal(series({1})) == series({1}));
  const Rational c(3, 7);
  CHECK(series_reciprocal(series({1, 0, c, 0, 0})) == series({1, 0, -c, 0, c * c}));
  CHECK_THROWS_AS(series_reciprocal(series({0, 1})), DomainError);

  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const PowerSeries a = random_series(rng, 8, true);
    CHECK(a * series_reciprocal(a) == PowerSeries::constant(1, 8));
  }
}

TEST_CASE("maclaurin coefficients of tan and sec") {
  const auto t = maclaurin_tan(7);
  CHECK(t[0] == 0);
  CHECK(t[1] == 1);
  CHECK(t[2] == 0);
  CHECK(t[3] == Rational(1, 3));
  CHECK(t[5] == Rational(2, 15));
  CHECK(t[7] == Rational(17, 315));
  const auto s = maclaurin_sec(6);
  CHECK(s[0] == 1);
  CHECK(s[1] == 0);
  CHECK(s[2] == Rational(1, 2));
  CHECK(s[4] == Rational(5, 24));
  CHECK(s[6] == Rational(61, 720));
}

TEST_CASE("tan and sec of a series") {
  const PowerSeries half = series({0, Rational(1, 2), 0, 0});
  CHECK(series_tan(half) == series({0, Rational(1, 2), 0, Rational(1, 24)}));
  CHECK(series_sec(PowerSeries::zero(5)) == PowerSeries::constant(1, 5));
  CHECK(series_sec(series({0, Rational(1, 2), 0})) == series({1, 0, Rational(1, 8)}));
  CHECK_THROWS_AS(series_tan(series({1, 1})), DomainError);
  CHECK_THROWS_AS(series_sec(series({Rational(1, 2)})), DomainError);
}

TEST_CASE("tan and sec agree with floating point at Z = 50") {
  std::mt19937_64 rng(9);
  const double Z = 50.0;
  std::uniform_int_distribution<int> num(-6, 6);
  for (int i = 0; i < 10; ++i) {
    PowerSeries th = PowerSeries::zero(8);
    for (std::size_t k = 1; k <= 8; ++k) th[k] = Rational(num(rng), 6);
    const double x = evaluate_series(th, Z);
    const double bound = 10.0 * std::pow(Z, -9.0) + 1e-15;
    CHECK(std::abs(evaluate_series(series_tan(th), Z) - std::tan(x)) <= bound);
    CHECK(std::abs(evaluate_series(series_sec(th), Z) - 1.0 / std::cos(x)) <= bound);
  }
}

TEST_CASE("derivative and shift in 1/Z") {
  // d/dZ (a0 + a1/Z + a2/Z^2) = -a1/Z^2 - 2 a2/Z^3
  CHECK(series_derivative(series({5, 3, 2, 0})) == series({0, 0, -3, -4}));
  CHECK(series_shift(series({5, 3, 2})) == series({0, 5, 3}));
}

TEST_CASE("evaluate series") {
  CHECK(evaluate_series(PowerSeries::constant(Rational(7, 3), 4), 123.0) ==
        doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  CHECK(evaluate_series(series({0, Rational(1, 2)}), 4.0) == 0.125);
  const FormalSolution fs = expansion_coefficients(ModelParams(2), 2);
  CHECK(evaluate_expansion(fs, 2, 10.0)[0] == doctest::Approx(0.99375).epsilon(1e-15));
  CHECK_THROWS_AS(evaluate_series(series({1}), 0.0), DomainError);
}

TEST_CASE("leading coefficients of the formal solution") {
  for (int n : {2, 3, 7}) {
    const FormalSolution fs = expansion_coefficients(ModelParams(n), 1);
    CHECK(fs.R[0] == 1);
    CHECK(fs.R[1] == 0);
    CHECK(fs.theta[0] == 0);
    CHECK(fs.theta[1] == Rational(1, 2));
  }
  const FormalSolution k0 = expansion_coefficients(ModelParams(2), 0);
  CHECK(k0.order() == 0);
  CHECK(k0.R[0] == 1);
}

TEST_CASE("known coefficients") {
  const FormalSolution fs = expansion_coefficients(ModelParams(2), 3);
  CHECK(fs.R[2] == Rational(-5, 8));
  CHECK(fs.theta[3] == Rational(-77, 48));
  for (int n = 2; n <= 6; ++n) {
    CHECK(expansion_coefficients(ModelParams(n), 2).R[2] ==
          Rational(-1, 8) - Rational(1, 2 * (n - 1)));
  }
}

TEST_CASE("parity and residuals through order 20") {
  for (int n = 2; n <= 6; ++n) {
    const FormalSolution fs = expansion_coefficients(ModelParams(n), 20);
    for (std::size_t k = 0; k <= 20; ++k) {
      if (k % 2 == 1) CHECK(fs.R[k] == 0);
      else CHECK(fs.theta[k] == 0);
    }
    const auto [first, second] = residual_check(fs);
    CHECK(first.order() == 20);
    CHECK(first.is_zero());
    CHECK(second.is_zero());
  }
  const auto [a, b] = residual_check(expansion_coefficients(ModelParams(3), 8));
  CHECK(a.is_zero());
  CHECK(b.is_zero());
}

TEST_CASE("perturbing theta_1 shows up in the first residual") {
  FormalSolution fs = expansion_coefficients(ModelParams(2), 10);
  fs.theta[1] += 1;
  const auto [first, second] = residual_check(fs);
  // tan(theta) gains 1/Z; nothing else in the first residual moves at order 1.
  CHECK(first[1] == 1);
  CHECK(!second.is_zero());
}

TEST_CASE("expansion is deterministic") {
  const FormalSolution a = expansion_coefficients(ModelParams(4), 16);
  const FormalSolution b = expansion_coefficients(ModelParams(4), 16);
  CHECK(a.R == b.R);
  CHECK(a.theta == b.theta);
  // Lower orders do not depend on the truncation order.
  const FormalSolution c = expansion_coefficients(ModelParams(4), 8);
  CHECK(a.R.truncated(8) == c.R);
  CHECK(a.theta.truncated(8) == c.theta);
}

TEST_CASE("rational strings") {
  CHECK(to_string(Rational(-77, 48)) == "-77/48");
  CHECK(to_string(Rational(0)) == "0");
  CHECK(to_string(Rational(1)) == "1");
}
