#pragma once

// Special functions backing the densities and the KS reference CDFs.
// Everything is evaluated in double precision with series or continued
// fractions; relative accuracy is ~1e-13 or better on the tested grids.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pkin/errors.hpp"

namespace pkin::special {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

namespace detail {

// log I0 via the power series sum_k (x^2/4)^k / (k!)^2. Converges for all x;
// used below the asymptotic cutoff where term magnitudes stay < 1e13.
inline double log_bessel_i0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return std::log(sum);
}

// Hankel expansion: I0(x) ~ e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
inline double log_bessel_i0_asymptotic(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (k * 8.0 * x);
    if (next > term) break;  // series starts diverging
    term = next;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

// Regularized lower incomplete gamma P(a, x) by series, x < a + 1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < 1000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction.
inline double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta (modified Lentz).
inline double beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 10000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace detail

inline constexpr double kBesselAsymptoticCutoff = 30.0;

/// log I0(kappa) for kappa >= 0, finite for arbitrarily large kappa.
inline double log_bessel_i0(double kappa) {
  if (!(kappa >= 0.0)) throw DomainError("log_bessel_i0: kappa must be >= 0");
  if (kappa < kBesselAsymptoticCutoff) return detail::log_bessel_i0_series(kappa);
  return detail::log_bessel_i0_asymptotic(kappa);
}

inline double log_beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("log_beta: shapes must be > 0");
  return std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
}

inline double chi2_logpdf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi2_logpdf: dof must be > 0");
  if (x < 0.0) return kNegInf;
  const double half = 0.5 * dof;
  if (x == 0.0) {
    if (half > 1.0) return kNegInf;
    if (half == 1.0) return -std::numbers::ln2;
    return std::numeric_limits<double>::infinity();
  }
  return (half - 1.0) * std::log(x) - 0.5 * x - half * std::numbers::ln2 - std::lgamma(half);
}

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_p: a must be > 0");
  if (x < 0.0) throw DomainError("gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_cf(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), without cancellation.
inline double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_q: a must be > 0");
  if (x < 0.0) throw DomainError("gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

inline double chi2_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi2_cdf: dof must be > 0");
  if (x <= 0.0) {
    if (x < 0.0) throw DomainError("chi2_cdf: x must be >= 0");
    return 0.0;
  }
  return gamma_p(0.5 * dof, 0.5 * x);
}

inline double chi2_sf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi2_sf: dof must be > 0");
  if (x < 0.0) throw DomainError("chi2_sf: x must be >= 0");
  return gamma_q(0.5 * dof, 0.5 * x);
}

/// I_x(a, b), the regularized incomplete beta function.
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta: shapes must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cf(x, a, b) / a;
  return 1.0 - front * detail::beta_cf(1.0 - x, b, a) / b;
}

inline double standard_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace pkin::special
