#pragma once

// Truncated power series in 1/Z with exact rational coefficients, and the
// formal solution of the rescaled capillary system at Z = infinity.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dropforge/model.hpp"

namespace dropforge {

using Rational = boost::multiprecision::cpp_rational;

/// sum_{k=0..K} a_k Z^-k. Binary operations truncate to the smaller order of
/// their operands; nothing ever extends K silently.
class PowerSeries {
 public:
  PowerSeries() : coeffs_(1) {}
  explicit PowerSeries(std::vector<Rational> coeffs);
  /// Zero series of truncation order K.
  static PowerSeries zero(std::size_t K);
  /// Constant c at truncation order K.
  static PowerSeries constant(const Rational& c, std::size_t K);

  std::size_t order() const { return coeffs_.size() - 1; }
  const Rational& operator[](std::size_t k) const { return coeffs_.at(k); }
  Rational& operator[](std::size_t k) { return coeffs_.at(k); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  /// Coefficients 0..k only (k <= order()).
  PowerSeries truncated(std::size_t k) const;
  bool is_zero() const;

  friend bool operator==(const PowerSeries&, const PowerSeries&) = default;

 private:
  std::vector<Rational> coeffs_;
};

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b);
PowerSeries operator-(const PowerSeries& a, const PowerSeries& b);
PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
PowerSeries series_scale(const PowerSeries& a, const Rational& c);

/// Multiplicative inverse through the order of `a`. Throws DomainError if a_0 == 0.
PowerSeries series_reciprocal(const PowerSeries& a);

/// tan(theta(Z)) and 1 / cos(theta(Z)) for a series without constant term.
/// Throws DomainError if theta_0 != 0.
PowerSeries series_tan(const PowerSeries& theta);
PowerSeries series_sec(const PowerSeries& theta);

/// d/dZ of sum a_k Z^-k = sum -k a_k Z^-(k+1), truncated to the same order.
PowerSeries series_derivative(const PowerSeries& a);
/// Multiplication by 1/Z, truncated to the same order.
PowerSeries series_shift(const PowerSeries& a);

/// Exact Maclaurin coefficients of tan x and sec x through x^K, from
/// tan' = 1 + tan^2 and sec' = sec tan.
std::vector<Rational> maclaurin_tan(std::size_t K);
std::vector<Rational> maclaurin_sec(std::size_t K);

/// Horner evaluation in the variable 1/Z. Throws DomainError unless Z > 0.
double evaluate_series(const PowerSeries& s, double Z);

struct FormalSolution {
  ModelParams params;
  PowerSeries R;      // R_k
  PowerSeries theta;  // theta_k

  std::size_t order() const { return R.order(); }
};

inline constexpr std::size_t kDefaultMaxOrder = 24;

/// Order-by-order coefficients of the formal solution. At order k the
/// dR/dZ equation gives
///   theta_k = (k - 1/2) R_{k-1} - [tan theta_{<k}]_k
/// and the dtheta/dZ equation gives
///   R_k = [1 / R_{<k}]_k - [sec theta_{<=k}]_k - (k-1) theta_{k-1} / (n-1).
FormalSolution expansion_coefficients(const ModelParams& p, std::size_t K);

/// Coefficients of the two residuals obtained by substituting the formal series
/// into the rescaled field, both through the truncation order:
///   dR/dZ + tan theta - R / (2Z)   and   dtheta/dZ - (n-1)(sec theta - 1/R).
std::pair<PowerSeries, PowerSeries> residual_check(const FormalSolution& fs);

/// Partial sums through order k evaluated at Z: (R, theta).
Vec2 evaluate_expansion(const FormalSolution& fs, std::size_t k, double Z);

std::string to_string(const Rational& q);

}  // namespace dropforge
