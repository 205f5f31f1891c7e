#pragma once

// Scalar densities used by the priors, references and targets. All
// densities are exposed in log space; derivatives are w.r.t. the argument.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pkin/angles.hpp"
#include "pkin/errors.hpp"
#include "pkin/special_functions.hpp"

namespace pkin {

using Rng = std::mt19937_64;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// ---------------------------------------------------------------------------
// von Mises

struct VonMisesParams {
  double mu = 0.0;
  double kappa = 0.0;

  VonMisesParams() = default;
  VonMisesParams(double mean, double concentration)
      : mu(wrap_angle(mean)), kappa(concentration) {
    if (!(kappa >= 0.0)) throw DomainError("von Mises: kappa must be >= 0");
  }
};

inline double vm_logpdf(double theta, const VonMisesParams& p) {
  if (!(p.kappa >= 0.0)) throw DomainError("von Mises: kappa must be >= 0");
  const double t = wrap_angle(theta);
  return p.kappa * std::cos(t - p.mu) - std::log(kTwoPi) - special::log_bessel_i0(p.kappa);
}

inline double vm_dlogpdf(double theta, const VonMisesParams& p) {
  return -p.kappa * std::sin(theta - p.mu);
}

// Best-Fisher rejection sampler (wrapped-Cauchy envelope). Very large kappa
// falls back to the normal limit, where the envelope degenerates.
inline double vm_sample(Rng& rng, const VonMisesParams& p) {
  if (!(p.kappa >= 0.0)) throw DomainError("von Mises: kappa must be >= 0");
  if (p.kappa < 1e-8) return wrap_angle(kPi * (2.0 * uniform01(rng) - 1.0));
  if (p.kappa > 1e6) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return wrap_angle(p.mu + normal(rng) / std::sqrt(p.kappa));
  }
  double s;
  if (p.kappa < 1e-5) {
    s = 1.0 / p.kappa + p.kappa;
  } else {
    const double r = 1.0 + std::sqrt(1.0 + 4.0 * p.kappa * p.kappa);
    const double rho = (r - std::sqrt(2.0 * r)) / (2.0 * p.kappa);
    s = (1.0 + rho * rho) / (2.0 * rho);
  }
  double w;
  for (;;) {
    const double z = std::cos(kPi * uniform01(rng));
    w = (1.0 + s * z) / (s + z);
    const double y = p.kappa * (s - w);
    const double v = uniform01(rng);
    if (y * (2.0 - y) - v >= 0.0) break;
    if (v > 0.0 && std::log(y / v) + 1.0 - y >= 0.0) break;
  }
  double angle = std::acos(std::clamp(w, -1.0, 1.0));
  if (uniform01(rng) < 0.5) angle = -angle;
  return wrap_angle(p.mu + angle);
}

// ---------------------------------------------------------------------------
// Stephens approximation to the resultant length of a von Mises random walk:
// 2 N gamma (1 - d/N) ~ Chi2(N - 1),  1/gamma = 1/kappa + 3/(8 kappa^2).

struct StephensParams {
  double kappa = 1.0;
  int n_steps = 2;

  StephensParams() = default;
  StephensParams(double concentration, int steps) : kappa(concentration), n_steps(steps) {
    if (!(kappa > 0.0)) throw DomainError("Stephens: kappa must be > 0");
    if (n_steps < 2) throw DomainError("Stephens: n_steps must be >= 2");
  }

  double gamma() const { return 1.0 / (1.0 / kappa + 3.0 / (8.0 * kappa * kappa)); }
  double dof() const { return n_steps - 1.0; }
  double transform(double d) const { return 2.0 * gamma() * (n_steps - d); }
};

// Zero and N are excluded: the chi-square limit there is 0 or infinite.
inline double stephens_logpdf(double d, const StephensParams& p) {
  const double n = p.n_steps;
  if (!(d > 0.0 && d < n)) return kNegInf;
  return special::chi2_logpdf(p.transform(d), p.dof()) + std::log(2.0 * p.gamma());
}

inline double stephens_dlogpdf(double d, const StephensParams& p) {
  const double n = p.n_steps;
  if (!(d > 0.0 && d < n)) return 0.0;
  const double u = p.transform(d);
  return -2.0 * p.gamma() * ((0.5 * p.dof() - 1.0) / u - 0.5);
}

// P(D <= d) = P(Chi2 >= transform(d)), renormalized over the truncated
// support so the CDF reaches exactly 1 at d = N.
inline double stephens_cdf(double d, const StephensParams& p) {
  const double n = p.n_steps;
  if (d <= 0.0) return 0.0;
  if (d >= n) return 1.0;
  const double upper = special::chi2_cdf(p.transform(0.0), p.dof());
  return special::chi2_sf(p.transform(d), p.dof()) / upper -
         (1.0 - upper) / upper;
}

// ---------------------------------------------------------------------------
// Beta(alpha, beta) rescaled to [0, N].

struct ScaledBetaParams {
  double alpha = 1.0;
  double beta = 1.0;
  double n_scale = 1.0;

  ScaledBetaParams() = default;
  ScaledBetaParams(double a, double b, double scale) : alpha(a), beta(b), n_scale(scale) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("ScaledBeta: shapes must be > 0");
    if (!(n_scale > 0.0)) throw DomainError("ScaledBeta: scale must be > 0");
  }
};

inline double scaled_beta_logpdf(double d, const ScaledBetaParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) throw DomainError("ScaledBeta: shapes must be > 0");
  if (!(d >= 0.0 && d <= p.n_scale)) return kNegInf;
  const double x = d / p.n_scale;
  auto xlogy = [](double a, double y) {
    if (a == 0.0) return 0.0;
    return a * std::log(y);
  };
  return xlogy(p.alpha - 1.0, x) + xlogy(p.beta - 1.0, 1.0 - x) - std::log(p.n_scale) -
         special::log_beta(p.alpha, p.beta);
}

inline double scaled_beta_dlogpdf(double d, const ScaledBetaParams& p) {
  if (!(d > 0.0 && d < p.n_scale)) return 0.0;
  return (p.alpha - 1.0) / d - (p.beta - 1.0) / (p.n_scale - d);
}

inline double scaled_beta_cdf(double d, const ScaledBetaParams& p) {
  if (d <= 0.0) return 0.0;
  if (d >= p.n_scale) return 1.0;
  return special::regularized_incomplete_beta(d / p.n_scale, p.alpha, p.beta);
}

// ---------------------------------------------------------------------------
// Gaussian

struct GaussianParams {
  double mean = 0.0;
  double variance = 1.0;

  GaussianParams() = default;
  GaussianParams(double m, double v) : mean(m), variance(v) {
    if (!(variance > 0.0)) throw DomainError("Gaussian: variance must be > 0");
  }

  double sd() const { return std::sqrt(variance); }
};

inline double gaussian_logpdf(double x, const GaussianParams& p) {
  if (!(p.variance > 0.0)) throw DomainError("Gaussian: variance must be > 0");
  const double z = x - p.mean;
  return -0.5 * std::log(kTwoPi * p.variance) - 0.5 * z * z / p.variance;
}

inline double gaussian_dlogpdf(double x, const GaussianParams& p) {
  return -(x - p.mean) / p.variance;
}

inline double gaussian_cdf(double x, const GaussianParams& p) {
  if (!(p.variance > 0.0)) throw DomainError("Gaussian: variance must be > 0");
  return special::standard_normal_cdf((x - p.mean) / p.sd());
}

inline double gaussian_sample(Rng& rng, const GaussianParams& p) {
  return std::normal_distribution<double>(p.mean, p.sd())(rng);
}

}  // namespace pkin
