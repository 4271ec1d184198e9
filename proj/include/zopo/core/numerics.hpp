#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <utility>

#include "zopo/core/error.hpp"

namespace zopo {

struct LogSumExp {
  double log_sum;
  std::size_t max_index;
};

/// log(sum_i exp(v_i)) shifted by the maximum. Entries may be -inf; +inf and
/// NaN are rejected.
inline LogSumExp log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("log_sum_exp: empty input");
  std::size_t imax = 0;
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw InvalidInput("log_sum_exp: entries must be finite or -inf");
    if (v > m) {
      m = v;
      imax = i;
    }
  }
  if (m == -std::numeric_limits<double>::infinity()) throw DegenerateWeights();
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return {m + std::log(s), imax};
}

namespace detail {

// exp(z^2) erf(z) = 2/sqrt(pi) * sum_n 2^n z^(2n+1) / (2n+1)!!, all terms share
// the sign of z so the sum has no cancellation.
inline double scaled_erf_series(double z) {
  const double z2 = z * z;
  double term = z;
  double sum = z;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * z2 / (2.0 * n + 1.0);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return 2.0 * std::numbers::inv_sqrtpi * sum;
}

// Laplace continued fraction erfcx(z) = 1/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))),
// evaluated with the modified Lentz method. Used for z >= 0.5.
inline double erfcx_continued_fraction(double z) {
  constexpr double tiny = 1e-300;
  double f = z;
  double C = z;
  double D = 0.0;
  for (int n = 1; n < 5000; ++n) {
    const double a = 0.5 * n;
    D = z + a * D;
    if (D == 0.0) D = tiny;
    C = z + a / C;
    if (C == 0.0) C = tiny;
    D = 1.0 / D;
    const double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::numbers::inv_sqrtpi / f;
}

}  // namespace detail

/// Scaled complementary error function exp(z^2) erfc(z).
///
/// Accuracy contract: relative error below 1e-12 on [-5, 50] (about 5e-15 in
/// practice). Continued fraction for z >= 0.5, series of the scaled erf on
/// (-2, 0.5) where it does not cancel, reflection
/// erfcx(z) = 2 exp(z^2) - erfcx(-z) for z <= -2. Overflows
/// to +inf below z ~ -26.6; use log_erfcx there.
inline double erfcx(double z) {
  if (std::isnan(z)) return z;
  if (z >= 0.5) {
    if (z == std::numeric_limits<double>::infinity()) return 0.0;
    return detail::erfcx_continued_fraction(z);
  }
  if (z > -2.0) return std::exp(z * z) - detail::scaled_erf_series(z);
  return 2.0 * std::exp(z * z) - detail::erfcx_continued_fraction(-z);
}

/// log(erfcx(z)), finite for every finite z.
inline double log_erfcx(double z) {
  if (z > -2.0) return std::log(erfcx(z));
  // erfcx(z) = exp(z^2) (2 - erfc(-z)) and erfc(-z) = exp(-z^2) erfcx(-z)
  const double tail = std::exp(-z * z) * detail::erfcx_continued_fraction(-z);
  return z * z + std::numbers::ln2 + std::log1p(-0.5 * tail);
}

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace zopo
