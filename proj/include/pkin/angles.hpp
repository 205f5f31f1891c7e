#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace pkin {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wraps into (-pi, pi].
inline double wrap_angle(double theta) {
  double r = std::remainder(theta, kTwoPi);  // [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

inline constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

// Ordered angles, every entry held in (-pi, pi].
class AngleVector {
 public:
  AngleVector() = default;

  explicit AngleVector(std::vector<double> values) : values_(std::move(values)) {
    for (double& v : values_) v = wrap_angle(v);
  }

  AngleVector(std::initializer_list<double> values)
      : AngleVector(std::vector<double>(values)) {}

  static AngleVector filled(std::size_t n, double value) {
    return AngleVector(std::vector<double>(n, value));
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const AngleVector&, const AngleVector&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace pkin
