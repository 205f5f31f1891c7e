#pragma once

// No-U-Turn sampler with multinomial trajectory sampling, the generalized
// U-turn criterion (including the cross-subtree checks) and dual-averaging
// step-size adaptation. Unit mass matrix.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pkin/distributions.hpp"
#include "pkin/errors.hpp"
#include "pkin/pk.hpp"

namespace pkin {

struct SamplerConfig {
  int warmup_steps = 1000;
  int sample_steps = 1000;
  int max_tree_depth = 10;
  double target_accept = 0.8;
  std::uint64_t seed = 0;
  double initial_step_size = 1.0;

  void validate() const {
    if (warmup_steps < 10) throw std::invalid_argument("SamplerConfig: warmup_steps must be >= 10");
    if (sample_steps < 1) throw std::invalid_argument("SamplerConfig: sample_steps must be >= 1");
    if (max_tree_depth < 1 || max_tree_depth > 12)
      throw std::invalid_argument("SamplerConfig: max_tree_depth must lie in [1, 12]");
    if (!(target_accept > 0.0 && target_accept < 1.0))
      throw std::invalid_argument("SamplerConfig: target_accept must lie in (0, 1)");
    if (!(initial_step_size > 0.0)) throw std::invalid_argument("SamplerConfig: initial_step_size must be > 0");
  }

  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

inline double max_relative_gradient_error(std::span<const double> analytic, std::span<const double> numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / (std::fabs(numeric[i]) + 1e-12));
  return worst;
}

inline std::vector<double> central_difference_grad(const VectorFn& logpdf, std::span<const double> point, double h) {
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = logpdf(x);
    x[i] = keep - h;
    const double down = logpdf(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline constexpr double kGradientCheckStep = 1e-5;
inline constexpr double kGradientCheckTolerance = 1e-4;
inline constexpr int kGradientCheckPoints = 20;

/// Log density and gradient over R^n.
class TargetDensity {
 public:
  TargetDensity(VectorFn logpdf, VectorGradFn grad, std::size_t dimension)
      : logpdf_(std::move(logpdf)), grad_(std::move(grad)), dim_(dimension) {}

  /// Builds a target and verifies `grad` against central differences at
  /// kGradientCheckPoints points drawn around `probe_center`. Throws
  /// NumericError if any point exceeds `tolerance`.
  static TargetDensity checked(VectorFn logpdf, VectorGradFn grad, std::span<const double> probe_center,
                               double probe_scale, std::uint64_t seed = 0,
                               double tolerance = kGradientCheckTolerance) {
    TargetDensity t(std::move(logpdf), std::move(grad), probe_center.size());
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, probe_scale);
    int checked = 0;
    for (int attempt = 0; attempt < 50 * kGradientCheckPoints && checked < kGradientCheckPoints; ++attempt) {
      std::vector<double> x(probe_center.begin(), probe_center.end());
      for (double& v : x) v += normal(rng);
      if (!t.finite_ball(x, kGradientCheckStep)) continue;
      std::vector<double> g;
      try {
        g = t.grad(x);
      } catch (const SingularityError&) {
        continue;
      }
      const auto fd = central_difference_grad(t.logpdf_, x, kGradientCheckStep);
      const double err = max_relative_gradient_error(g, fd);
      if (!(err <= tolerance))
        throw NumericError("TargetDensity: gradient disagrees with finite differences (relative error " +
                           std::to_string(err) + ")");
      ++checked;
    }
    if (checked < kGradientCheckPoints)
      throw NumericError("TargetDensity: could not find finite probe points for the gradient check");
    return t;
  }

  static TargetDensity from_model(const PkModel& model, std::span<const double> probe_center, double probe_scale,
                                  std::uint64_t seed = 0) {
    return checked([model](std::span<const double> w) { return model.logpdf(w); },
                   [model](std::span<const double> w) { return model.grad(w); }, probe_center, probe_scale, seed);
  }

  double logpdf(std::span<const double> x) const { return logpdf_(x); }
  std::vector<double> grad(std::span<const double> x) const { return grad_(x); }
  std::size_t dimension() const { return dim_; }
  const VectorFn& logpdf_fn() const { return logpdf_; }

 private:
  bool finite_ball(std::span<const double> x, double h) const {
    if (!std::isfinite(logpdf_(x))) return false;
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double keep = y[i];
      for (double s : {h, -h}) {
        y[i] = keep + s;
        if (!std::isfinite(logpdf_(y))) return false;
      }
      y[i] = keep;
    }
    return true;
  }

  VectorFn logpdf_;
  VectorGradFn grad_;
  std::size_t dim_;
};

/// max_i |analytic_i - fd_i| / (|fd_i| + 1e-12) with central differences.
inline double check_gradient(const TargetDensity& target, std::span<const double> point, double h) {
  const auto g = target.grad(point);
  const auto fd = central_difference_grad(target.logpdf_fn(), point, h);
  return max_relative_gradient_error(g, fd);
}

struct LeapfrogResult {
  std::vector<double> position;
  std::vector<double> momentum;
  bool divergent = false;
};

/// One velocity-Verlet step: half momentum, full position, half momentum.
inline LeapfrogResult leapfrog(const TargetDensity& target, std::span<const double> position,
                               std::span<const double> momentum, double step_size) {
  LeapfrogResult r{std::vector<double>(position.begin(), position.end()),
                   std::vector<double>(momentum.begin(), momentum.end()), false};
  auto grad_or_flag = [&](std::span<const double> q) -> std::vector<double> {
    try {
      auto g = target.grad(q);
      for (double v : g)
        if (!std::isfinite(v)) r.divergent = true;
      return g;
    } catch (const SingularityError&) {
      r.divergent = true;
      return std::vector<double>(q.size(), 0.0);
    }
  };
  auto g = grad_or_flag(r.position);
  for (std::size_t i = 0; i < g.size(); ++i) r.momentum[i] += 0.5 * step_size * g[i];
  for (std::size_t i = 0; i < g.size(); ++i) r.position[i] += step_size * r.momentum[i];
  g = grad_or_flag(r.position);
  for (std::size_t i = 0; i < g.size(); ++i) r.momentum[i] += 0.5 * step_size * g[i];
  return r;
}

struct ChainResult {
  std::vector<std::vector<double>> samples;  // sample_steps x dimension
  std::vector<double> accept_stats;          // per sampling step
  std::vector<double> step_size_trace;       // per warmup step, then the final adapted value
  std::vector<int> tree_depths;              // per sampling step
  std::vector<int> n_leapfrog;               // per sampling step
  double step_size = 0.0;                    // adapted value used for sampling
  int divergence_count = 0;                  // sampling phase
  int warmup_divergence_count = 0;

  double mean_accept() const {
    if (accept_stats.empty()) return 0.0;
    double s = 0.0;
    for (double a : accept_stats) s += a;
    return s / static_cast<double>(accept_stats.size());
  }

  friend bool operator==(const ChainResult&, const ChainResult&) = default;
};

/// Dual-averaging constants (Hoffman & Gelman defaults).
struct DualAveraging {
  double gamma = 0.05;
  double t0 = 10.0;
  double kappa = 0.75;
};

inline constexpr double kMaxEnergyError = 1000.0;

namespace detail {

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<double> add(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

// No U-turn across the span whose end momenta are p_minus/p_plus and whose
// summed momentum is rho (unit metric, so p_sharp = p).
inline bool no_uturn(std::span<const double> p_minus, std::span<const double> p_plus, std::span<const double> rho) {
  return dot(p_plus, rho) > 0.0 && dot(p_minus, rho) > 0.0;
}

struct State {
  std::vector<double> q;
  std::vector<double> p;
  std::vector<double> grad;
  double logp = -std::numeric_limits<double>::infinity();

  double energy() const { return -logp + 0.5 * dot(p, p); }
};

class Nuts {
 public:
  Nuts(const TargetDensity& target, Rng& rng, int max_depth)
      : target_(target), rng_(rng), max_depth_(max_depth) {}

  // Evaluates logp and gradient; false when the point is outside the
  // differentiable support.
  bool evaluate(State& s) const {
    s.logp = target_.logpdf(s.q);
    if (!std::isfinite(s.logp)) return false;
    try {
      s.grad = target_.grad(s.q);
    } catch (const SingularityError&) {
      return false;
    }
    for (double g : s.grad)
      if (!std::isfinite(g)) return false;
    return true;
  }

  // In-place leapfrog on a state that carries its gradient.
  bool step(State& s, double eps) const {
    for (std::size_t i = 0; i < s.q.size(); ++i) s.p[i] += 0.5 * eps * s.grad[i];
    for (std::size_t i = 0; i < s.q.size(); ++i) s.q[i] += eps * s.p[i];
    if (!evaluate(s)) return false;
    for (std::size_t i = 0; i < s.q.size(); ++i) s.p[i] += 0.5 * eps * s.grad[i];
    return true;
  }

  struct Transition {
    State state;
    double accept_stat = 0.0;
    int depth = 0;
    int n_leapfrog = 0;
    bool divergent = false;
  };

  Transition transition(const State& start, double eps) {
    std::normal_distribution<double> normal(0.0, 1.0);
    State z = start;
    for (double& v : z.p) v = normal(rng_);
    const double h0 = z.energy();

    State forward = z;
    State backward = z;
    std::vector<double> rho = z.p;
    std::vector<double> p_fwd_end = z.p;  // momentum at the forward-most state
    std::vector<double> p_bck_end = z.p;  // momentum at the backward-most state
    double log_weight = 0.0;

    Transition t;
    t.state = z;
    sum_accept_ = 0.0;
    n_leapfrog_ = 0;
    divergent_ = false;

    while (t.depth < max_depth_) {
      const bool go_forward = uniform01(rng_) > 0.5;
      State& edge = go_forward ? forward : backward;
      Subtree sub = build(edge, t.depth, go_forward ? eps : -eps, h0);
      if (!sub.valid) break;
      ++t.depth;

      if (sub.log_weight > log_weight) {
        t.state = std::move(sub.proposal);
      } else if (uniform01(rng_) < std::exp(sub.log_weight - log_weight)) {
        t.state = std::move(sub.proposal);
      }
      log_weight = log_add_exp(log_weight, sub.log_weight);

      // Time-ordered merge: new subtree is appended after (forward) or
      // before (backward) the existing trajectory.
      const std::vector<double> old_rho = rho;
      rho = add(rho, sub.rho);
      bool persist;
      if (go_forward) {
        // old: [p_bck_end .. p_fwd_end], new: [sub.p_begin .. sub.p_end]
        persist = no_uturn(p_bck_end, sub.p_end, rho) &&
                  no_uturn(p_bck_end, sub.p_begin, add(old_rho, sub.p_begin)) &&
                  no_uturn(p_fwd_end, sub.p_end, add(sub.rho, p_fwd_end));
        p_fwd_end = sub.p_end;
      } else {
        // new (reversed): [sub.p_end .. sub.p_begin], old: [p_bck_end .. p_fwd_end]
        persist = no_uturn(sub.p_end, p_fwd_end, rho) &&
                  no_uturn(sub.p_end, p_bck_end, add(sub.rho, p_bck_end)) &&
                  no_uturn(sub.p_begin, p_fwd_end, add(old_rho, sub.p_begin));
        p_bck_end = sub.p_end;
      }
      if (!persist) break;
    }
    t.n_leapfrog = n_leapfrog_;
    t.divergent = divergent_;
    t.accept_stat = n_leapfrog_ > 0 ? sum_accept_ / n_leapfrog_ : 0.0;
    return t;
  }

 private:
  struct Subtree {
    std::vector<double> p_begin;  // momentum of the first state built
    std::vector<double> p_end;    // momentum of the last state built
    std::vector<double> rho;
    double log_weight = -std::numeric_limits<double>::infinity();
    State proposal;
    bool valid = true;
  };

  // Extends `edge` by 2^depth leapfrog steps of size eps (negative = backward).
  Subtree build(State& edge, int depth, double eps, double h0) {
    if (depth == 0) {
      Subtree s;
      ++n_leapfrog_;
      const bool ok = step(edge, eps);
      double h = ok ? edge.energy() : std::numeric_limits<double>::infinity();
      if (std::isnan(h)) h = std::numeric_limits<double>::infinity();
      if (h - h0 > kMaxEnergyError) {
        divergent_ = true;
        s.valid = false;
      }
      s.log_weight = h0 - h;
      sum_accept_ += (h0 - h > 0.0) ? 1.0 : std::exp(h0 - h);
      s.p_begin = edge.p;
      s.p_end = edge.p;
      s.rho = edge.p;
      s.proposal = edge;
      return s;
    }
    Subtree left = build(edge, depth - 1, eps, h0);
    if (!left.valid) return left;
    Subtree right = build(edge, depth - 1, eps, h0);
    if (!right.valid) return right;

    Subtree merged;
    merged.log_weight = log_add_exp(left.log_weight, right.log_weight);
    if (uniform01(rng_) < std::exp(right.log_weight - merged.log_weight))
      merged.proposal = std::move(right.proposal);
    else
      merged.proposal = std::move(left.proposal);
    merged.rho = add(left.rho, right.rho);
    merged.valid = no_uturn(left.p_begin, right.p_end, merged.rho) &&
                   no_uturn(left.p_begin, right.p_begin, add(left.rho, right.p_begin)) &&
                   no_uturn(left.p_end, right.p_end, add(right.rho, left.p_end));
    merged.p_begin = std::move(left.p_begin);
    merged.p_end = std::move(right.p_end);
    return merged;
  }

  const TargetDensity& target_;
  Rng& rng_;
  int max_depth_;
  double sum_accept_ = 0.0;
  int n_leapfrog_ = 0;
  bool divergent_ = false;
};

// Doubling/halving search for a step size whose single-step acceptance
// crosses 1/2, starting from `eps`.
inline double find_reasonable_step_size(const TargetDensity& target, const State& start, double eps, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Nuts probe(target, rng, 1);
  State z = start;
  for (double& v : z.p) v = normal(rng);
  const double h0 = z.energy();
  auto log_accept = [&](double e) {
    State s = z;
    if (!probe.step(s, e)) return -std::numeric_limits<double>::infinity();
    const double h = s.energy();
    return std::isfinite(h) ? h0 - h : -std::numeric_limits<double>::infinity();
  };
  double la = log_accept(eps);
  const double direction = la > std::log(0.5) ? 1.0 : -1.0;
  for (int i = 0; i < 100; ++i) {
    if (direction > 0 ? !(la > std::log(0.5)) : !(la < std::log(0.5))) break;
    const double next = direction > 0 ? eps * 2.0 : eps * 0.5;
    if (next > 1e7 || next < 1e-10) break;
    eps = next;
    la = log_accept(eps);
  }
  return eps;
}

}  // namespace detail

/// Runs one NUTS chain from `init`. Deterministic given config.seed.
inline ChainResult nuts_sample(const TargetDensity& target, std::span<const double> init,
                               const SamplerConfig& config, DualAveraging da = {}) {
  config.validate();
  if (init.size() != target.dimension()) throw std::invalid_argument("nuts_sample: init has the wrong dimension");

  Rng rng(config.seed);
  detail::Nuts nuts(target, rng, config.max_tree_depth);
  detail::State state;
  state.q.assign(init.begin(), init.end());
  state.p.assign(init.size(), 0.0);
  if (!nuts.evaluate(state)) throw std::invalid_argument("nuts_sample: log density is not finite at init");

  double eps = detail::find_reasonable_step_size(target, state, config.initial_step_size, rng);
  const double mu = std::log(10.0 * eps);
  double h_bar = 0.0;
  double log_eps_bar = 0.0;

  ChainResult result;
  result.step_size_trace.reserve(static_cast<std::size_t>(config.warmup_steps) + 1);
  int warmup_ok = 0;
  for (int m = 1; m <= config.warmup_steps; ++m) {
    result.step_size_trace.push_back(eps);
    auto t = nuts.transition(state, eps);
    state = std::move(t.state);
    if (t.divergent)
      ++result.warmup_divergence_count;
    else
      ++warmup_ok;
    const double w = 1.0 / (m + da.t0);
    h_bar = (1.0 - w) * h_bar + w * (config.target_accept - t.accept_stat);
    const double log_eps = mu - std::sqrt(static_cast<double>(m)) / da.gamma * h_bar;
    const double eta = std::pow(static_cast<double>(m), -da.kappa);
    log_eps_bar = eta * log_eps + (1.0 - eta) * log_eps_bar;
    eps = std::exp(log_eps);
  }
  if (warmup_ok == 0) throw AdaptationError("nuts_sample: every warmup transition diverged");
  eps = std::exp(log_eps_bar);
  result.step_size = eps;
  result.step_size_trace.push_back(eps);

  result.samples.reserve(static_cast<std::size_t>(config.sample_steps));
  for (int s = 0; s < config.sample_steps; ++s) {
    auto t = nuts.transition(state, eps);
    state = std::move(t.state);
    result.samples.push_back(state.q);
    result.accept_stats.push_back(t.accept_stat);
    result.tree_depths.push_back(t.depth);
    result.n_leapfrog.push_back(t.n_leapfrog);
    if (t.divergent) ++result.divergence_count;
  }
  return result;
}

}  // namespace pkin
