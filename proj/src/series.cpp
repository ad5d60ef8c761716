#include "dropforge/series.hpp"

#include <algorithm>
#include <stdexcept>

namespace dropforge {

PowerSeries::PowerSeries(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("power series needs at least one coefficient");
}

PowerSeries PowerSeries::zero(std::size_t K) { return PowerSeries(std::vector<Rational>(K + 1)); }

PowerSeries PowerSeries::constant(const Rational& c, std::size_t K) {
  PowerSeries s = zero(K);
  s[0] = c;
  return s;
}

PowerSeries PowerSeries::truncated(std::size_t k) const {
  if (k > order()) throw std::invalid_argument("cannot truncate a series above its order");
  return PowerSeries(std::vector<Rational>(coeffs_.begin(), coeffs_.begin() + k + 1));
}

bool PowerSeries::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return q == 0; });
}

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
  const std::size_t K = std::min(a.order(), b.order());
  PowerSeries out = PowerSeries::zero(K);
  for (std::size_t k = 0; k <= K; ++k) out[k] = a[k] + b[k];
  return out;
}

PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
  const std::size_t K = std::min(a.order(), b.order());
  PowerSeries out = PowerSeries::zero(K);
  for (std::size_t k = 0; k <= K; ++k) out[k] = a[k] - b[k];
  return out;
}

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  const std::size_t K = std::min(a.order(), b.order());
  PowerSeries out = PowerSeries::zero(K);
  for (std::size_t i = 0; i <= K; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j <= K; ++j) {
      if (b[j] != 0) out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

PowerSeries series_scale(const PowerSeries& a, const Rational& c) {
  PowerSeries out = a;
  for (std::size_t k = 0; k <= out.order(); ++k) out[k] *= c;
  return out;
}

PowerSeries series_reciprocal(const PowerSeries& a) {
  if (a[0] == 0) throw DomainError("reciprocal of a series with zero constant term");
  const std::size_t K = a.order();
  PowerSeries b = PowerSeries::zero(K);
  const Rational inv0 = 1 / a[0];
  b[0] = inv0;
  for (std::size_t k = 1; k <= K; ++k) {
    Rational acc = 0;
    for (std::size_t j = 1; j <= k; ++j) {
      if (a[j] != 0) acc += a[j] * b[k - j];
    }
    b[k] = -inv0 * acc;
  }
  return b;
}

std::vector<Rational> maclaurin_tan(std::size_t K) {
  // (m+1) t_{m+1} = [1 + t^2]_m
  std::vector<Rational> t(K + 1);
  for (std::size_t m = 0; m < K; ++m) {
    Rational sq = 0;
    for (std::size_t i = 0; i <= m; ++i) sq += t[i] * t[m - i];
    if (m == 0) sq += 1;
    t[m + 1] = sq / static_cast<int>(m + 1);
  }
  return t;
}

std::vector<Rational> maclaurin_sec(std::size_t K) {
  // (m+1) s_{m+1} = [s t]_m, s_0 = 1
  const std::vector<Rational> t = maclaurin_tan(K);
  std::vector<Rational> s(K + 1);
  s[0] = 1;
  for (std::size_t m = 0; m < K; ++m) {
    Rational prod = 0;
    for (std::size_t i = 0; i <= m; ++i) prod += s[i] * t[m - i];
    s[m + 1] = prod / static_cast<int>(m + 1);
  }
  return s;
}

namespace {

// sum_m c_m theta^m for theta without constant term; theta^m starts at Z^-m,
// so only m <= K contributes.
PowerSeries compose(const std::vector<Rational>& c, const PowerSeries& theta) {
  if (theta[0] != 0) throw DomainError("composition needs a series without constant term");
  const std::size_t K = theta.order();
  PowerSeries out = PowerSeries::constant(c[0], K);
  PowerSeries power = PowerSeries::constant(1, K);
  for (std::size_t m = 1; m <= K; ++m) {
    power = power * theta;
    if (c[m] == 0) continue;
    for (std::size_t k = m; k <= K; ++k) out[k] += c[m] * power[k];
  }
  return out;
}

}  // namespace

PowerSeries series_tan(const PowerSeries& theta) {
  return compose(maclaurin_tan(theta.order()), theta);
}

PowerSeries series_sec(const PowerSeries& theta) {
  return compose(maclaurin_sec(theta.order()), theta);
}

PowerSeries series_derivative(const PowerSeries& a) {
  PowerSeries out = PowerSeries::zero(a.order());
  for (std::size_t j = 1; j <= a.order(); ++j) {
    out[j] = -static_cast<int>(j - 1) * a[j - 1];
  }
  return out;
}

PowerSeries series_shift(const PowerSeries& a) {
  PowerSeries out = PowerSeries::zero(a.order());
  for (std::size_t j = 1; j <= a.order(); ++j) out[j] = a[j - 1];
  return out;
}

double evaluate_series(const PowerSeries& s, double Z) {
  if (!(Z > 0.0)) throw DomainError("series evaluation needs Z > 0");
  const double w = 1.0 / Z;
  double acc = 0.0;
  for (std::size_t k = s.order() + 1; k-- > 0;) {
    acc = acc * w + s[k].convert_to<double>();
  }
  return acc;
}

FormalSolution expansion_coefficients(const ModelParams& p, std::size_t K) {
  PowerSeries R = PowerSeries::zero(K);
  PowerSeries theta = PowerSeries::zero(K);
  R[0] = 1;
  const Rational kappa = p.n() - 1;

  const std::vector<Rational> tan_c = maclaurin_tan(K);
  const std::vector<Rational> sec_c = maclaurin_sec(K);

  for (std::size_t k = 1; k <= K; ++k) {
    // theta is known below order k here; theta_k itself is still zero.
    const PowerSeries known_theta = theta.truncated(k);
    const Rational tan_k = compose(tan_c, known_theta)[k];
    theta[k] = (Rational(2 * static_cast<int>(k) - 1, 2)) * R[k - 1] - tan_k;

    const PowerSeries known_R = R.truncated(k);  // R_k still zero
    const Rational recip_k = series_reciprocal(known_R)[k];
    const Rational sec_k = compose(sec_c, theta.truncated(k))[k];
    R[k] = recip_k - sec_k - static_cast<int>(k - 1) * theta[k - 1] / kappa;
  }
  return {p, std::move(R), std::move(theta)};
}

std::pair<PowerSeries, PowerSeries> residual_check(const FormalSolution& fs) {
  const Rational kappa = fs.params.n() - 1;
  const PowerSeries first =
      series_derivative(fs.R) + series_tan(fs.theta) - series_scale(series_shift(fs.R), Rational(1, 2));
  const PowerSeries second =
      series_derivative(fs.theta) -
      series_scale(series_sec(fs.theta) - series_reciprocal(fs.R), kappa);
  return {first, second};
}

Vec2 evaluate_expansion(const FormalSolution& fs, std::size_t k, double Z) {
  return {evaluate_series(fs.R.truncated(k), Z), evaluate_series(fs.theta.truncated(k), Z)};
}

std::string to_string(const Rational& q) { return q.str(); }

}  // namespace dropforge
