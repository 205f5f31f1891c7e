#pragma once

// Probability kinematics (Jeffrey conditioning).
//
// Discrete form: given a prior pi over outcomes, a partition {E_j} and new
// marginals p(E_j), the posterior is p(w) = pi(w | E(w)) p(E(w)). It matches
// the new marginals on the partition and keeps every within-element
// conditional of the prior.
//
// Continuous form (reference ratio): for a fine variable w with prior pi(w)
// and a coarse map xi(w) whose prior marginal is pi(xi), the posterior with
// coarse marginal p(xi) is
//     p(w) = p(xi(w)) / pi(xi(w)) * pi(w),
// evaluated here as an unnormalized log density. Dropping the reference
// term gives the naive product p(xi(w)) pi(w), which does not have marginal
// p(xi).

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pkin/errors.hpp"
#include "pkin/stats.hpp"

namespace pkin {

// ---------------------------------------------------------------------------
// Discrete

inline constexpr double kProbabilitySumTolerance = 1e-12;

class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  explicit DiscreteDistribution(std::map<std::string, double> probabilities)
      : p_(std::move(probabilities)) {
    double sum = 0.0;
    for (const auto& [label, prob] : p_) {
      if (!(prob >= 0.0)) throw DomainError("DiscreteDistribution: negative probability for '" + label + "'");
      sum += prob;
    }
    if (std::fabs(sum - 1.0) > kProbabilitySumTolerance)
      throw DomainError("DiscreteDistribution: probabilities must sum to 1");
  }

  DiscreteDistribution(std::initializer_list<std::pair<const std::string, double>> init)
      : DiscreteDistribution(std::map<std::string, double>(init)) {}

  double operator[](const std::string& label) const {
    auto it = p_.find(label);
    return it == p_.end() ? 0.0 : it->second;
  }

  bool contains(const std::string& label) const { return p_.count(label) != 0; }
  std::size_t size() const { return p_.size(); }
  const std::map<std::string, double>& probabilities() const { return p_; }

  auto begin() const { return p_.begin(); }
  auto end() const { return p_.end(); }

 private:
  std::map<std::string, double> p_;
};

/// Assignment of fine outcomes to partition-element labels.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::map<std::string, std::string> assignment) : assignment_(std::move(assignment)) {}
  Partition(std::initializer_list<std::pair<const std::string, std::string>> init) : assignment_(init) {}

  const std::string& element_of(const std::string& outcome) const {
    auto it = assignment_.find(outcome);
    if (it == assignment_.end()) throw std::invalid_argument("Partition: outcome '" + outcome + "' is unassigned");
    return it->second;
  }

  std::set<std::string> elements() const {
    std::set<std::string> out;
    for (const auto& [outcome, element] : assignment_) out.insert(element);
    return out;
  }

  const std::map<std::string, std::string>& assignment() const { return assignment_; }

 private:
  std::map<std::string, std::string> assignment_;
};

/// Marginal of `dist` on the partition elements.
inline std::map<std::string, double> partition_marginals(const DiscreteDistribution& dist, const Partition& partition) {
  std::map<std::string, double> mass;
  for (const auto& element : partition.elements()) mass[element] = 0.0;
  for (const auto& [outcome, prob] : dist) mass[partition.element_of(outcome)] += prob;
  return mass;
}

inline DiscreteDistribution discrete_pk_update(const DiscreteDistribution& prior, const Partition& partition,
                                               const DiscreteDistribution& new_marginals) {
  const auto elements = partition.elements();
  for (const auto& [label, prob] : new_marginals)
    if (!elements.count(label))
      throw std::invalid_argument("discrete_pk_update: evidence label '" + label + "' is not a partition element");

  const auto prior_mass = partition_marginals(prior, partition);
  for (const auto& [element, mass] : prior_mass)
    if (mass <= 0.0 && new_marginals[element] > 0.0)
      throw SupportMismatchError("discrete_pk_update: element '" + element +
                                 "' has positive evidence but zero prior mass");

  std::map<std::string, double> posterior;
  for (const auto& [outcome, prob] : prior) {
    const std::string& element = partition.element_of(outcome);
    const double mass = prior_mass.at(element);
    posterior[outcome] = mass > 0.0 ? prob / mass * new_marginals[element] : 0.0;
  }
  return DiscreteDistribution(std::move(posterior));
}

// ---------------------------------------------------------------------------
// Continuous reference-ratio model

using VectorFn = std::function<double(std::span<const double>)>;
using VectorGradFn = std::function<std::vector<double>(std::span<const double>)>;
using ScalarFn = std::function<double(double)>;

/// Log density over the fine variable, with its gradient.
struct FineDensity {
  VectorFn logpdf;
  VectorGradFn grad;
};

/// The many-to-one map w -> xi(w), with its gradient.
struct CoarseMap {
  VectorFn value;
  VectorGradFn grad;
};

/// Log density over the coarse variable, with its derivative.
struct CoarseDensity {
  ScalarFn logpdf;
  ScalarFn dlogpdf;
};

enum class UpdateMode {
  kReferenceRatio,  // p(xi) / pi(xi) * pi(w)
  kNaiveProduct,    // p(xi) * pi(w), reference omitted
};

struct CoarseRange {
  double lo;
  double hi;
};

inline constexpr int kSupportScanPoints = 2000;

class PkModel {
 public:
  /// When `range` is given, the coarse range is scanned on an interior grid
  /// and a SupportMismatchError is raised wherever the target has mass but
  /// the reference does not.
  PkModel(FineDensity prior, CoarseMap coarse_map, CoarseDensity target, CoarseDensity reference,
          UpdateMode mode = UpdateMode::kReferenceRatio, std::optional<CoarseRange> range = std::nullopt)
      : prior_(std::move(prior)),
        coarse_(std::move(coarse_map)),
        target_(std::move(target)),
        reference_(std::move(reference)),
        mode_(mode) {
    if (range) check_common_support(*range);
  }

  UpdateMode mode() const { return mode_; }
  bool ablation() const { return mode_ == UpdateMode::kNaiveProduct; }

  const FineDensity& prior() const { return prior_; }
  const CoarseMap& coarse_map() const { return coarse_; }
  const CoarseDensity& target() const { return target_; }
  const CoarseDensity& reference() const { return reference_; }

  PkModel with_mode(UpdateMode mode) const {
    PkModel copy = *this;
    copy.mode_ = mode;
    return copy;
  }

  /// Unnormalized posterior log density. -inf marks the rejection region.
  double logpdf(std::span<const double> omega) const {
    const double prior = prior_.logpdf(omega);
    if (prior == kNegInfinity) return kNegInfinity;
    const double xi = coarse_.value(omega);
    const double target = target_.logpdf(xi);
    if (target == kNegInfinity) return kNegInfinity;
    double out = target + prior;
    if (mode_ == UpdateMode::kReferenceRatio) {
      const double reference = reference_.logpdf(xi);
      if (reference == kNegInfinity) return kNegInfinity;
      out -= reference;
    }
    if (std::isnan(out)) throw NumericError("PkModel: log density evaluated to NaN");
    return out;
  }

  std::vector<double> grad(std::span<const double> omega) const {
    const double xi = coarse_.value(omega);
    double outer = target_.dlogpdf(xi);
    if (mode_ == UpdateMode::kReferenceRatio) outer -= reference_.dlogpdf(xi);
    std::vector<double> g = prior_.grad(omega);
    const std::vector<double> dxi = coarse_.grad(omega);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += outer * dxi[i];
    return g;
  }

 private:
  static constexpr double kNegInfinity = -std::numeric_limits<double>::infinity();

  void check_common_support(const CoarseRange& range) const {
    const double step = (range.hi - range.lo) / kSupportScanPoints;
    for (int i = 0; i < kSupportScanPoints; ++i) {
      const double xi = range.lo + (i + 0.5) * step;
      const double t = target_.logpdf(xi);
      const double r = reference_.logpdf(xi);
      if (std::isfinite(t) && !std::isfinite(r))
        throw SupportMismatchError("PkModel: target has mass at xi = " + std::to_string(xi) +
                                   " where the reference density vanishes");
    }
  }

  FineDensity prior_;
  CoarseMap coarse_;
  CoarseDensity target_;
  CoarseDensity reference_;
  UpdateMode mode_;
};

/// target(xi(w)) - reference(xi(w)) + prior(w); the reference term is
/// omitted in naive-product mode.
inline double reference_ratio_logpdf(const PkModel& model, std::span<const double> omega) {
  return model.logpdf(omega);
}

// ---------------------------------------------------------------------------
// Reference estimation

inline constexpr double kMadToSigma = 1.4826;

struct RobustGaussianFit {
  double mean = 0.0;      // sample median
  double variance = 1.0;  // (1.4826 * MAD)^2
  double mad = 0.0;

  double sd() const { return std::sqrt(variance); }
};

inline RobustGaussianFit estimate_reference_gaussian(std::span<const double> samples) {
  if (samples.size() < 2) throw DegenerateSampleError("estimate_reference_gaussian: need at least 2 samples");
  std::vector<double> x(samples.begin(), samples.end());
  const double med = median(x);
  for (double& v : x) v = std::fabs(v - med);
  const double mad = median(std::move(x));
  if (!(mad > 0.0))
    throw DegenerateSampleError("estimate_reference_gaussian: median absolute deviation is zero");
  RobustGaussianFit fit;
  fit.mean = med;
  fit.mad = mad;
  const double sd = kMadToSigma * mad;
  fit.variance = sd * sd;
  return fit;
}

// ---------------------------------------------------------------------------
// Faithfulness: the posterior's coarse marginal should match the evidence.

inline KSReport faithfulness_check(std::span<const std::vector<double>> posterior_samples, const VectorFn& coarse_map,
                                   const std::function<double(double)>& target_cdf) {
  if (posterior_samples.size() < 100) throw std::invalid_argument("faithfulness_check: need at least 100 samples");
  std::vector<double> xi;
  xi.reserve(posterior_samples.size());
  for (const auto& w : posterior_samples) xi.push_back(coarse_map(w));
  return ks_one_sample(xi, target_cdf);
}

}  // namespace pkin
