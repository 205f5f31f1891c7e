#pragma once

// Experiment drivers: the von Mises random walk (VRW) update, the 8-residue
// helix update and the discrete horse-race example, plus their ablations.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pkin/backbone3d.hpp"
#include "pkin/distributions.hpp"
#include "pkin/pk.hpp"
#include "pkin/sampler.hpp"
#include "pkin/stats.hpp"
#include "pkin/walk2d.hpp"

namespace pkin {

enum class Experiment { kVrw, kProtein, kWhitworth };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kVrw: return "vrw";
    case Experiment::kProtein: return "protein";
    case Experiment::kWhitworth: return "whitworth";
  }
  return "?";
}

inline Experiment experiment_from_string(const std::string& s) {
  if (s == "vrw") return Experiment::kVrw;
  if (s == "protein") return Experiment::kProtein;
  if (s == "whitworth") return Experiment::kWhitworth;
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

struct VrwParams {
  double mu = 0.0;
  double kappa = 10.0;
  int n_steps = 5;
  double alpha = 10.0;
  double beta = 10.0;

  friend bool operator==(const VrwParams&, const VrwParams&) = default;
};

/// Ideal geometry with the N-CA-C angle opened so that the helical prior's
/// end-to-end CA median sits at ~12.97 A (Engh-Huber ideals give ~11.3 A).
inline GeometryParams calibrated_helix_geometry() {
  GeometryParams g;
  g.n_ca_c = 118.4;
  return g;
}

struct ProteinParams {
  double mu_phi_deg = -60.0;
  double mu_psi_deg = -40.0;
  double kappa_phi = 20.0;
  double kappa_psi = 20.0;
  int length = 8;
  double target_mean = 11.0;     // A
  double target_variance = 0.25;  // A^2
  int reference_samples = 10000;
  GeometryParams geometry = calibrated_helix_geometry();

  friend bool operator==(const ProteinParams&, const ProteinParams&) = default;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::kVrw;
  bool ablation = false;
  bool identity_check = false;  // target := reference, posterior must equal prior
  std::uint64_t seed = 1;
  int repeats = 10;
  int thin_stride = 5;
  int histogram_bins = 40;
  int prior_histogram_samples = 10000;  // VRW forward draws for the prior histogram
  SamplerConfig sampler;
  VrwParams vrw;
  ProteinParams protein;

  void validate() const {
    if (repeats < 1) throw std::invalid_argument("config: repeats must be >= 1");
    if (thin_stride < 1) throw std::invalid_argument("config: thin must be >= 1");
    if (histogram_bins < 1) throw std::invalid_argument("config: histogram_bins must be >= 1");
    sampler.validate();
    if (experiment == Experiment::kVrw) {
      VonMisesParams(vrw.mu, vrw.kappa);
      StephensParams(vrw.kappa, vrw.n_steps);
      ScaledBetaParams(vrw.alpha, vrw.beta, vrw.n_steps);
    } else if (experiment == Experiment::kProtein) {
      VonMisesParams(deg2rad(protein.mu_phi_deg), protein.kappa_phi);
      VonMisesParams(deg2rad(protein.mu_psi_deg), protein.kappa_psi);
      GaussianParams(protein.target_mean, protein.target_variance);
      protein.geometry.validate();
      if (protein.length < 2) throw std::invalid_argument("config: protein.length must be >= 2");
      if (protein.reference_samples < 30) throw std::invalid_argument("config: protein.reference_samples must be >= 30");
    }
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Settings used in the published runs.
inline ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  if (e == Experiment::kProtein) c.sampler.max_tree_depth = 6;
  return c;
}

struct RepeatResult {
  int repeat = 0;
  std::uint64_t seed = 0;
  KSReport ks;
  double step_size = 0.0;
  double mean_accept = 0.0;
  int divergences = 0;
  std::optional<RobustGaussianFit> reference_fit;  // protein only

  friend bool operator==(const RepeatResult& a, const RepeatResult& b) {
    auto fit_eq = [](const std::optional<RobustGaussianFit>& x, const std::optional<RobustGaussianFit>& y) {
      if (x.has_value() != y.has_value()) return false;
      return !x || (x->mean == y->mean && x->variance == y->variance && x->mad == y->mad);
    };
    return a.repeat == b.repeat && a.seed == b.seed && a.ks == b.ks && a.step_size == b.step_size &&
           a.mean_accept == b.mean_accept && a.divergences == b.divergences &&
           fit_eq(a.reference_fit, b.reference_fit);
  }
};

struct ReportSummary {
  double min_statistic = 0.0;
  double median_statistic = 0.0;
  double max_statistic = 0.0;
  double median_p_value = 0.0;
  double max_p_value = 0.0;

  friend bool operator==(const ReportSummary&, const ReportSummary&) = default;
};

/// Figure data: one row per bin.
struct HistogramTable {
  std::vector<double> bin_lo;
  std::vector<double> bin_hi;
  std::vector<double> prior_density;
  std::vector<double> posterior_density;
  std::vector<double> ablation_density;

  friend bool operator==(const HistogramTable&, const HistogramTable&) = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RepeatResult> repeats;
  ReportSummary summary;
  HistogramTable histograms;
  double wall_clock_seconds = 0.0;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

inline ReportSummary summarize(const std::vector<RepeatResult>& repeats) {
  if (repeats.empty()) return {};
  std::vector<double> stats;
  std::vector<double> ps;
  for (const auto& r : repeats) {
    stats.push_back(r.ks.statistic);
    ps.push_back(r.ks.p_value);
  }
  ReportSummary s;
  s.min_statistic = *std::min_element(stats.begin(), stats.end());
  s.max_statistic = *std::max_element(stats.begin(), stats.end());
  s.median_statistic = median(stats);
  s.median_p_value = median(ps);
  s.max_p_value = *std::max_element(ps.begin(), ps.end());
  return s;
}

// ---------------------------------------------------------------------------
// Acceptance bands checked by `--assert` and the acceptance suite.

struct AcceptanceBand {
  double ks_min = 0.0;
  double ks_max = 1.0;
  double median_p_min = 0.0;
  double p_each_min = 0.0;  // every repeat's p must exceed this
  double p_each_max = 1.0;  // every repeat's p must be below this
  std::string description;
};

inline AcceptanceBand acceptance_band(const ExperimentConfig& c) {
  AcceptanceBand b;
  if (c.identity_check) {
    b.p_each_min = 0.01;
    b.description = "identity: every KS p-value > 0.01 against the prior coarse marginal";
  } else if (c.experiment == Experiment::kVrw && !c.ablation) {
    b.ks_min = 0.02;
    b.ks_max = 0.12;
    b.median_p_min = 0.2;
    b.description = "vrw: KS in [0.02, 0.12], median p >= 0.2";
  } else if (c.experiment == Experiment::kVrw) {
    b.ks_min = 0.5;
    b.p_each_max = 1e-50;
    b.description = "vrw ablation: KS >= 0.5, p < 1e-50";
  } else if (c.experiment == Experiment::kProtein && !c.ablation) {
    b.ks_min = 0.02;
    b.ks_max = 0.15;
    b.median_p_min = 0.2;
    b.description = "protein: KS in [0.02, 0.15], median p >= 0.2";
  } else if (c.experiment == Experiment::kProtein) {
    b.ks_min = 0.25;
    b.p_each_max = 1e-10;
    b.description = "protein ablation: KS >= 0.25, p < 1e-10";
  }
  return b;
}

inline bool meets_band(const ExperimentReport& r, const AcceptanceBand& b) {
  for (const auto& rep : r.repeats) {
    if (rep.ks.statistic < b.ks_min || rep.ks.statistic > b.ks_max) return false;
    if (!(rep.ks.p_value > b.p_each_min) && b.p_each_min > 0.0) return false;
    if (!(rep.ks.p_value < b.p_each_max) && b.p_each_max < 1.0) return false;
  }
  return r.summary.median_p_value >= b.median_p_min;
}

// ---------------------------------------------------------------------------
// Model construction

namespace detail {

// splitmix64 finalizer, decorrelates the sampler stream from the prior stream.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline FineDensity von_mises_product_prior(std::vector<VonMisesParams> per_coordinate) {
  auto params = std::make_shared<const std::vector<VonMisesParams>>(std::move(per_coordinate));
  FineDensity prior;
  prior.logpdf = [params](std::span<const double> w) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += vm_logpdf(w[i], (*params)[i]);
    return s;
  };
  prior.grad = [params](std::span<const double> w) {
    std::vector<double> g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = vm_dlogpdf(w[i], (*params)[i]);
    return g;
  };
  return prior;
}

inline CoarseDensity as_coarse(const StephensParams& p) {
  return {[p](double d) { return stephens_logpdf(d, p); }, [p](double d) { return stephens_dlogpdf(d, p); }};
}
inline CoarseDensity as_coarse(const ScaledBetaParams& p) {
  return {[p](double d) { return scaled_beta_logpdf(d, p); }, [p](double d) { return scaled_beta_dlogpdf(d, p); }};
}
inline CoarseDensity as_coarse(const GaussianParams& p) {
  return {[p](double x) { return gaussian_logpdf(x, p); }, [p](double x) { return gaussian_dlogpdf(x, p); }};
}

inline std::vector<double> wrapped(const std::vector<double>& w) {
  std::vector<double> out(w);
  for (double& v : out) v = wrap_angle(v);
  return out;
}

}  // namespace detail

/// Reference-ratio model for the random walk: prior i.i.d. vM(mu, kappa),
/// coarse map d(theta), reference Stephens(kappa, N), target ScaledBeta (or
/// Stephens itself for the identity check).
inline PkModel make_vrw_model(const VrwParams& p, UpdateMode mode, bool identity = false) {
  const VonMisesParams vm(p.mu, p.kappa);
  const StephensParams reference(p.kappa, p.n_steps);
  CoarseDensity target = identity ? detail::as_coarse(reference)
                                  : detail::as_coarse(ScaledBetaParams(p.alpha, p.beta, p.n_steps));
  CoarseMap coarse{[](std::span<const double> w) { return resultant_length(w); },
                   [](std::span<const double> w) { return resultant_length_grad(w); }};
  return PkModel(detail::von_mises_product_prior(std::vector<VonMisesParams>(p.n_steps, vm)), std::move(coarse),
                 std::move(target), detail::as_coarse(reference), mode, CoarseRange{0.0, double(p.n_steps)});
}

inline std::vector<VonMisesParams> protein_prior_params(const ProteinParams& p) {
  std::vector<VonMisesParams> out;
  for (int i = 0; i < p.length; ++i) out.emplace_back(deg2rad(p.mu_phi_deg), p.kappa_phi);
  for (int i = 0; i < p.length; ++i) out.emplace_back(deg2rad(p.mu_psi_deg), p.kappa_psi);
  return out;
}

/// End-to-end CA distances of `count` forward draws from the dihedral prior.
inline std::vector<double> sample_protein_prior_distances(Rng& rng, const ProteinParams& p, int count) {
  const auto params = protein_prior_params(p);
  std::vector<double> flat(params.size());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = vm_sample(rng, params[i]);
    out.push_back(end_to_end_ca_distance(flat, p.geometry));
  }
  return out;
}

/// Reference-ratio model for the helix: prior product of vM over
/// [phi..., psi...], coarse map first-to-last CA distance, Gaussian reference
/// from the robust fit, Gaussian target (or the reference itself).
inline PkModel make_protein_model(const ProteinParams& p, const RobustGaussianFit& fit, UpdateMode mode,
                                  bool identity = false) {
  const GaussianParams reference(fit.mean, fit.variance);
  const GaussianParams target = identity ? reference : GaussianParams(p.target_mean, p.target_variance);
  const GeometryParams geom = p.geometry;
  CoarseMap coarse{[geom](std::span<const double> w) { return end_to_end_ca_distance(w, geom); },
                   [geom](std::span<const double> w) { return end_to_end_ca_distance_grad(w, geom); }};
  return PkModel(detail::von_mises_product_prior(protein_prior_params(p)), std::move(coarse),
                 detail::as_coarse(target), detail::as_coarse(reference), mode);
}

// ---------------------------------------------------------------------------
// Runs

namespace detail {

struct ChainOutcome {
  std::vector<double> coarse;  // coarse value of every (unthinned) sample
  std::vector<std::vector<double>> samples;  // wrapped angles
  ChainResult chain;
};

inline ChainOutcome run_chain(const PkModel& model, std::vector<double> init, const SamplerConfig& sampler,
                              Rng& init_rng, const std::function<std::vector<double>(Rng&)>& prior_draw) {
  // Start at the prior mode; fall back to prior draws when the posterior
  // vanishes there (e.g. d = N for the Beta target).
  for (int tries = 0; !std::isfinite(model.logpdf(init)) && tries < 1000; ++tries) init = prior_draw(init_rng);
  if (!std::isfinite(model.logpdf(init))) throw std::runtime_error("run_chain: no finite starting point found");

  auto target = TargetDensity::from_model(model, init, 0.1, sampler.seed);
  ChainOutcome out;
  out.chain = nuts_sample(target, init, sampler);
  for (const auto& q : out.chain.samples) {
    out.samples.push_back(wrapped(q));
    out.coarse.push_back(model.coarse_map().value(q));
  }
  return out;
}

inline HistogramTable make_histograms(const std::vector<double>& prior, const std::vector<double>& posterior,
                                      const std::vector<double>& ablation, int bins, double lo, double hi) {
  const Histogram hp = histogram(prior, bins, lo, hi);
  const Histogram hq = histogram(posterior, bins, lo, hi);
  const Histogram ha = histogram(ablation, bins, lo, hi);
  HistogramTable t;
  for (int i = 0; i < bins; ++i) {
    t.bin_lo.push_back(hp.edges[i]);
    t.bin_hi.push_back(hp.edges[i + 1]);
    t.prior_density.push_back(hp.densities[i]);
    t.posterior_density.push_back(hq.densities[i]);
    t.ablation_density.push_back(ha.densities[i]);
  }
  return t;
}

inline UpdateMode main_mode(const ExperimentConfig& c) {
  return c.ablation ? UpdateMode::kNaiveProduct : UpdateMode::kReferenceRatio;
}

inline UpdateMode other_mode(UpdateMode m) {
  return m == UpdateMode::kReferenceRatio ? UpdateMode::kNaiveProduct : UpdateMode::kReferenceRatio;
}

}  // namespace detail

/// Optional hook for per-repeat artifacts (e.g. coordinate dumps).
struct RepeatObserver {
  std::function<void(int repeat, const std::vector<std::vector<double>>& wrapped_samples)> on_samples;
};

inline ExperimentReport run_vrw_experiment(const ExperimentConfig& config, const RepeatObserver& observer = {}) {
  if (config.experiment != Experiment::kVrw) throw std::invalid_argument("run_vrw_experiment: experiment must be vrw");
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const VrwParams& p = config.vrw;
  const VonMisesParams vm(p.mu, p.kappa);
  const StephensParams stephens(p.kappa, p.n_steps);
  const ScaledBetaParams beta(p.alpha, p.beta, p.n_steps);
  const PkModel model = make_vrw_model(p, detail::main_mode(config), config.identity_check);

  std::function<double(double)> cdf;
  if (config.identity_check)
    cdf = [stephens](double d) { return stephens_cdf(d, stephens); };
  else
    cdf = [beta](double d) { return scaled_beta_cdf(d, beta); };

  auto prior_draw = [vm, n = p.n_steps](Rng& rng) { return vrw_sample(rng, vm, n).first.vector(); };

  ExperimentReport report;
  report.config = config;
  for (int r = 0; r < config.repeats; ++r) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
    Rng prior_rng(seed);
    std::vector<double> prior_d;
    if (r == 0) {
      prior_d.reserve(static_cast<std::size_t>(config.prior_histogram_samples));
      for (int i = 0; i < config.prior_histogram_samples; ++i)
        prior_d.push_back(resultant_length(vrw_sample(prior_rng, vm, p.n_steps).first));
    }
    SamplerConfig sampler = config.sampler;
    sampler.seed = detail::mix_seed(seed);
    const std::vector<double> init(static_cast<std::size_t>(p.n_steps), p.mu);
    auto outcome = detail::run_chain(model, init, sampler, prior_rng, prior_draw);

    RepeatResult rr;
    rr.repeat = r;
    rr.seed = seed;
    rr.ks = ks_one_sample(thin(outcome.coarse, static_cast<std::size_t>(config.thin_stride)), cdf);
    rr.step_size = outcome.chain.step_size;
    rr.mean_accept = outcome.chain.mean_accept();
    rr.divergences = outcome.chain.divergence_count;
    report.repeats.push_back(rr);
    if (observer.on_samples) observer.on_samples(r, outcome.samples);

    if (r == 0) {
      Rng other_rng(seed);
      for (int i = 0; i < config.prior_histogram_samples; ++i) vrw_sample(other_rng, vm, p.n_steps);
      auto other = detail::run_chain(model.with_mode(detail::other_mode(model.mode())), init, sampler, other_rng,
                                     prior_draw);
      const bool main_is_pk = model.mode() == UpdateMode::kReferenceRatio;
      report.histograms = detail::make_histograms(prior_d, main_is_pk ? outcome.coarse : other.coarse,
                                                  main_is_pk ? other.coarse : outcome.coarse,
                                                  config.histogram_bins, 0.0, double(p.n_steps));
    }
  }
  report.summary = summarize(report.repeats);
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

inline constexpr double kProteinHistogramLo = 8.0;
inline constexpr double kProteinHistogramHi = 16.0;

inline ExperimentReport run_protein_experiment(const ExperimentConfig& config, const RepeatObserver& observer = {}) {
  if (config.experiment != Experiment::kProtein)
    throw std::invalid_argument("run_protein_experiment: experiment must be protein");
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const ProteinParams& p = config.protein;
  const GaussianParams target(p.target_mean, p.target_variance);
  const auto prior_params = protein_prior_params(p);
  auto prior_draw = [prior_params](Rng& rng) {
    std::vector<double> w(prior_params.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = vm_sample(rng, prior_params[i]);
    return w;
  };
  std::vector<double> init;
  for (const auto& vm : prior_params) init.push_back(vm.mu);

  ExperimentReport report;
  report.config = config;
  for (int r = 0; r < config.repeats; ++r) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
    Rng prior_rng(seed);
    std::vector<double> reference_d = sample_protein_prior_distances(prior_rng, p, p.reference_samples);
    RobustGaussianFit fit;
    try {
      fit = estimate_reference_gaussian(reference_d);
    } catch (const DegenerateSampleError& e) {
      throw DegenerateSampleError(std::string(e.what()) + " (protein reference, " +
                                  std::to_string(reference_d.size()) + " samples, seed " + std::to_string(seed) +
                                  ")");
    }
    const PkModel model = make_protein_model(p, fit, detail::main_mode(config), config.identity_check);

    std::function<double(double)> cdf;
    if (config.identity_check) {
      auto ecdf = std::make_shared<EmpiricalCdf>(reference_d);
      cdf = [ecdf](double x) { return (*ecdf)(x); };
    } else {
      cdf = [target](double x) { return gaussian_cdf(x, target); };
    }

    SamplerConfig sampler = config.sampler;
    sampler.seed = detail::mix_seed(seed);
    auto outcome = detail::run_chain(model, init, sampler, prior_rng, prior_draw);

    RepeatResult rr;
    rr.repeat = r;
    rr.seed = seed;
    rr.ks = ks_one_sample(thin(outcome.coarse, static_cast<std::size_t>(config.thin_stride)), cdf);
    rr.step_size = outcome.chain.step_size;
    rr.mean_accept = outcome.chain.mean_accept();
    rr.divergences = outcome.chain.divergence_count;
    rr.reference_fit = fit;
    report.repeats.push_back(rr);
    if (observer.on_samples) observer.on_samples(r, outcome.samples);

    if (r == 0) {
      Rng other_rng(seed);
      sample_protein_prior_distances(other_rng, p, p.reference_samples);
      auto other = detail::run_chain(model.with_mode(detail::other_mode(model.mode())), init, sampler, other_rng,
                                     prior_draw);
      const bool main_is_pk = model.mode() == UpdateMode::kReferenceRatio;
      report.histograms = detail::make_histograms(reference_d, main_is_pk ? outcome.coarse : other.coarse,
                                                  main_is_pk ? other.coarse : outcome.coarse,
                                                  config.histogram_bins, kProteinHistogramLo, kProteinHistogramHi);
    }
  }
  report.summary = summarize(report.repeats);
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

inline ExperimentReport run_experiment(const ExperimentConfig& config, const RepeatObserver& observer = {}) {
  switch (config.experiment) {
    case Experiment::kVrw: return run_vrw_experiment(config, observer);
    case Experiment::kProtein: return run_protein_experiment(config, observer);
    case Experiment::kWhitworth: break;
  }
  throw std::invalid_argument("run_experiment: whitworth is not a sampling experiment");
}

// ---------------------------------------------------------------------------
// Whitworth's horses

/// Prior (A 1/2, B 1/4, C 1/4); evidence moves P(A) to `p_a` and says nothing
/// else, so the partition is {A} vs {B, C}.
inline DiscreteDistribution run_whitworth(double p_a = 2.0 / 3.0) {
  const DiscreteDistribution prior{{"A", 0.5}, {"B", 0.25}, {"C", 0.25}};
  const Partition partition{{"A", "A"}, {"B", "not A"}, {"C", "not A"}};
  const DiscreteDistribution evidence{{"A", p_a}, {"not A", 1.0 - p_a}};
  return discrete_pk_update(prior, partition, evidence);
}

}  // namespace pkin
