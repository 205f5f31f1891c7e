#pragma once

// Von Mises random walk in the plane: unit steps with angles theta_i,
// chi_0 = (0, 0), chi_i = chi_{i-1} + (cos theta_i, sin theta_i).

#include <array>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "pkin/angles.hpp"
#include "pkin/distributions.hpp"
#include "pkin/errors.hpp"

namespace pkin {

using Point2 = std::array<double, 2>;

struct Walk2D {
  std::vector<Point2> points;  // N + 1 points, points[0] = origin

  std::size_t n_steps() const { return points.empty() ? 0 : points.size() - 1; }
  const Point2& endpoint() const { return points.back(); }
};

inline constexpr double kResultantSingularity = 1e-9;

inline Walk2D coords_from_angles(std::span<const double> theta) {
  if (theta.empty()) throw std::invalid_argument("coords_from_angles: empty angle vector");
  Walk2D walk;
  walk.points.reserve(theta.size() + 1);
  Point2 p{0.0, 0.0};
  walk.points.push_back(p);
  for (double t : theta) {
    p[0] += std::cos(t);
    p[1] += std::sin(t);
    walk.points.push_back(p);
  }
  return walk;
}

inline Walk2D coords_from_angles(const AngleVector& theta) { return coords_from_angles(theta.values()); }

inline Point2 resultant_vector(std::span<const double> theta) {
  Point2 r{0.0, 0.0};
  for (double t : theta) {
    r[0] += std::cos(t);
    r[1] += std::sin(t);
  }
  return r;
}

/// d = |sum_i v(theta_i)|, in [0, N].
inline double resultant_length(std::span<const double> theta) {
  if (theta.empty()) throw std::invalid_argument("resultant_length: empty angle vector");
  const Point2 r = resultant_vector(theta);
  return std::hypot(r[0], r[1]);
}

inline double resultant_length(const AngleVector& theta) { return resultant_length(theta.values()); }

inline double resultant_length(const Walk2D& walk) {
  const Point2& a = walk.points.front();
  const Point2& b = walk.points.back();
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

/// Gradient of d w.r.t. each angle. Throws SingularityError when d is below
/// kResultantSingularity, where the map is not differentiable.
inline std::vector<double> resultant_length_grad(std::span<const double> theta) {
  const Point2 r = resultant_vector(theta);
  const double d = std::hypot(r[0], r[1]);
  if (!(d > kResultantSingularity))
    throw SingularityError("resultant_length_grad: resultant length below singularity threshold");
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    g[i] = (-std::sin(theta[i]) * r[0] + std::cos(theta[i]) * r[1]) / d;
  return g;
}

inline std::vector<double> resultant_length_grad(const AngleVector& theta) {
  return resultant_length_grad(theta.values());
}

/// Forward draw from the random-walk prior: i.i.d. von Mises step angles.
inline std::pair<AngleVector, Walk2D> vrw_sample(Rng& rng, const VonMisesParams& params, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("vrw_sample: n_steps must be >= 1");
  std::vector<double> theta(static_cast<std::size_t>(n_steps));
  for (double& t : theta) t = vm_sample(rng, params);
  AngleVector angles(std::move(theta));
  Walk2D walk = coords_from_angles(angles);
  return {std::move(angles), std::move(walk)};
}

}  // namespace pkin
