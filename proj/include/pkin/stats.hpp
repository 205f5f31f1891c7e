#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pkin/errors.hpp"

namespace pkin {

struct KSReport {
  double statistic = 0.0;
  double p_value = 1.0;
  int n_effective = 0;

  friend bool operator==(const KSReport&, const KSReport&) = default;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = P(sqrt(n) D > lambda)
/// = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  // Below ~0.2 the series alternates too slowly to be useful and Q = 1
  // to within 1e-20 anyway.
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-12 * sum || term == 0.0) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// One-sample Kolmogorov-Smirnov test of `samples` against `cdf`.
inline KSReport ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 10) throw std::invalid_argument("ks_one_sample: need at least 10 samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::stable_sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double stat = 0.0;
  double prev_f = -1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidCdfError("ks_one_sample: cdf value outside [0, 1]");
    if (f < prev_f) throw InvalidCdfError("ks_one_sample: cdf is not monotone on the sample grid");
    prev_f = f;
    const double above = (static_cast<double>(i) + 1.0) / n - f;
    const double below = f - static_cast<double>(i) / n;
    stat = std::max({stat, above, below});
  }
  KSReport r;
  r.statistic = std::clamp(stat, 0.0, 1.0);
  r.n_effective = static_cast<int>(x.size());
  r.p_value = kolmogorov_survival(std::sqrt(n) * r.statistic);
  return r;
}

/// Keeps indices 0, stride, 2 stride, ...
template <typename T>
std::vector<T> thin(std::span<const T> samples, std::size_t stride) {
  if (stride < 1) throw std::invalid_argument("thin: stride must be >= 1");
  std::vector<T> out;
  out.reserve(samples.size() / stride + 1);
  for (std::size_t i = 0; i < samples.size(); i += stride) out.push_back(samples[i]);
  return out;
}

template <typename T>
std::vector<T> thin(const std::vector<T>& samples, std::size_t stride) {
  return thin(std::span<const T>(samples), stride);
}

struct Histogram {
  std::vector<double> edges;      // bins + 1 uniform edges
  std::vector<double> densities;  // integrates to the in-range sample fraction

  std::size_t bins() const { return densities.size(); }
};

inline Histogram histogram(std::span<const double> samples, int bins, double lo, double hi) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("histogram: need lo < hi");
  Histogram h;
  const double width = (hi - lo) / bins;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + i * width;
  h.edges.back() = hi;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double s : samples) {
    if (!(s >= lo && s <= hi)) continue;
    auto k = static_cast<int>((s - lo) / width);
    counts[static_cast<std::size_t>(std::min(k, bins - 1))] += 1.0;
  }
  const double n = samples.empty() ? 1.0 : static_cast<double>(samples.size());
  h.densities.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) h.densities[i] = counts[i] / (n * width);
  return h;
}

/// Empirical CDF with linear interpolation between order statistics; used
/// when the reference marginal is only known through samples.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples) : x_(std::move(samples)) {
    if (x_.size() < 2) throw std::invalid_argument("EmpiricalCdf: need at least 2 samples");
    std::sort(x_.begin(), x_.end());
  }

  double operator()(double v) const {
    if (v <= x_.front()) return 0.0;
    if (v >= x_.back()) return 1.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), v);
    const auto j = static_cast<std::size_t>(it - x_.begin());  // x_[j-1] <= v < x_[j]
    const double lo = x_[j - 1];
    const double hi = x_[j];
    const double frac = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    return (static_cast<double>(j - 1) + frac) / static_cast<double>(x_.size() - 1);
  }

 private:
  std::vector<double> x_;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace pkin
