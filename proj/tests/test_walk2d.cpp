#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pkin/sampler.hpp"
#include "pkin/stats.hpp"
#include "pkin/walk2d.hpp"

using namespace pkin;

TEST(Walk2D, StraightWalk) {
  const auto w = coords_from_angles(AngleVector({0.0, 0.0, 0.0}));
  ASSERT_EQ(w.points.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(w.points[i][0], i);
    EXPECT_DOUBLE_EQ(w.points[i][1], 0.0);
  }
  EXPECT_EQ(w.n_steps(), 3u);
}

TEST(Walk2D, VerticalAndBacktrack) {
  const auto up = coords_from_angles(AngleVector({kPi / 2, kPi / 2}));
  EXPECT_NEAR(up.endpoint()[0], 0.0, 1e-15);
  EXPECT_NEAR(up.endpoint()[1], 2.0, 1e-15);
  const auto back = coords_from_angles(AngleVector({0.0, kPi}));
  EXPECT_NEAR(back.endpoint()[0], 0.0, 1e-15);
  EXPECT_NEAR(back.endpoint()[1], 0.0, 1e-15);
  EXPECT_NEAR(resultant_length(back), 0.0, 1e-15);
}

TEST(Walk2D, ResultantLength) {
  EXPECT_NEAR(resultant_length(AngleVector::filled(6, 1.3)), 6.0, 1e-14);
  EXPECT_NEAR(resultant_length(AngleVector({0.0, kPi})), 0.0, 1e-15);
  EXPECT_NEAR(resultant_length(AngleVector({0.0, kPi / 2})), std::sqrt(2.0), 1e-15);
}

TEST(Walk2D, RotationInvariance) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> th(5), rot(5);
    const double shift = u(rng);
    for (int i = 0; i < 5; ++i) {
      th[i] = u(rng);
      rot[i] = th[i] + shift;
    }
    EXPECT_NEAR(resultant_length(th), resultant_length(rot), 1e-12);
  }
}

TEST(Walk2D, GradientAtMaximumIsZero) {
  for (double g : resultant_length_grad(AngleVector::filled(5, 0.0))) EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(Walk2D, GradientRightAngle) {
  // R = (1, 1): dd/dtheta_i = (-R_x sin theta_i + R_y cos theta_i) / |R|
  const auto g = resultant_length_grad(AngleVector({0.0, kPi / 2}));
  EXPECT_NEAR(g[0], std::sqrt(2.0) / 2, 1e-14);
  EXPECT_NEAR(g[1], -std::sqrt(2.0) / 2, 1e-14);
}

TEST(Walk2D, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> th(5);
    for (auto& v : th) v = u(rng);
    if (resultant_length(th) < 0.05) continue;
    const auto g = resultant_length_grad(th);
    const auto fd =
        central_difference_grad([](std::span<const double> x) { return resultant_length(x); }, th, 1e-5);
    EXPECT_LE(max_relative_gradient_error(g, fd), 1e-6);
  }
}

TEST(Walk2D, GradientSingularityThrows) {
  EXPECT_THROW(resultant_length_grad(AngleVector({0.0, kPi})), SingularityError);
}

TEST(Walk2D, EmptyAngleVectorRejected) {
  EXPECT_THROW(coords_from_angles(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(resultant_length(std::vector<double>{}), std::invalid_argument);
}

TEST(VrwSample, DeterministicLimit) {
  Rng rng(5);
  const auto [theta, walk] = vrw_sample(rng, VonMisesParams(0.0, 1e6), 5);
  EXPECT_EQ(theta.size(), 5u);
  EXPECT_NEAR(resultant_length(walk), 5.0, 1e-3);
}

TEST(VrwSample, UniformTwoStepMean) {
  Rng rng(6);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += resultant_length(vrw_sample(rng, VonMisesParams(0.0, 0.0), 2).second);
  EXPECT_NEAR(sum / n, 4.0 / kPi, 0.01);
}

class VrwStephens : public ::testing::TestWithParam<double> {};

// The Stephens approximation loosens as kappa decreases, so smaller sample sizes
// are used there; the kappa = 10 case uses the full 1e5 draws.
TEST_P(VrwStephens, ResultantFollowsStephens) {
  const double kappa = GetParam();
  const int n = kappa >= 10 ? 100000 : 5000;
  Rng rng(7);
  const StephensParams sp(kappa, 5);
  std::vector<double> d(n);
  for (auto& v : d) v = resultant_length(vrw_sample(rng, VonMisesParams(0.0, kappa), 5).second);
  const auto ks = ks_one_sample(d, [&](double x) { return stephens_cdf(x, sp); });
  EXPECT_GT(ks.p_value, 0.01) << "KS " << ks.statistic;
}

INSTANTIATE_TEST_SUITE_P(Kappas, VrwStephens, ::testing::Values(4.0, 10.0, 50.0));
