#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pkin/special_functions.hpp"
#include "pkin/stats.hpp"

using namespace pkin;

TEST(Ks, ExactQuantiles) {
  const int n = 100;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = (i + 0.5) / n;
  const auto r = ks_one_sample(x, [](double v) { return std::clamp(v, 0.0, 1.0); });
  EXPECT_NEAR(r.statistic, 0.005, 1e-15);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_EQ(r.n_effective, 100);
}

TEST(Ks, UniformCalibration) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  int pass = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(10000);
    for (auto& v : x) v = u(rng);
    pass += ks_one_sample(x, [](double v) { return std::clamp(v, 0.0, 1.0); }).p_value > 0.01;
  }
  EXPECT_GE(pass, 95);
}

TEST(Ks, ShiftedNormal) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> x(1000);
  for (auto& v : x) v = n(rng);
  const auto r = ks_one_sample(x, [](double v) { return special::standard_normal_cdf(v - 1.0); });
  EXPECT_NEAR(r.statistic, 0.383, 0.04);
  EXPECT_LT(r.p_value, 1e-50);
}

TEST(Ks, SurvivalMonotone) {
  double prev = 1.0;
  for (double l = 0.0; l < 4.0; l += 0.01) {
    const double q = kolmogorov_survival(l);
    EXPECT_LE(q, prev + 1e-15);
    EXPECT_GE(q, 0.0);
    prev = q;
  }
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.0494, 5e-4);  // classical 5% point
}

TEST(Ks, InvalidCdf) {
  std::vector<double> x(20);
  for (int i = 0; i < 20; ++i) x[i] = i;
  EXPECT_THROW(ks_one_sample(x, [](double v) { return 1.0 - v / 20; }), InvalidCdfError);
  EXPECT_THROW(ks_one_sample(x, [](double v) { return v; }), InvalidCdfError);
  EXPECT_THROW(ks_one_sample(std::vector<double>(5, 0.0), [](double) { return 0.5; }), std::invalid_argument);
}

TEST(Thin, Cases) {
  std::vector<int> x(1000);
  for (int i = 0; i < 1000; ++i) x[i] = i;
  EXPECT_EQ(thin(x, 1), x);
  const auto t5 = thin(x, 5);
  ASSERT_EQ(t5.size(), 200u);
  EXPECT_EQ(t5[1], 5);
  const auto big = thin(x, 5000);
  ASSERT_EQ(big.size(), 1u);
  EXPECT_EQ(big[0], 0);
  EXPECT_EQ(thin(thin(x, 2), 3), thin(x, 6));
  EXPECT_THROW(thin(x, 0), std::invalid_argument);
}

TEST(Histogram, SinglePoint) {
  const auto h = histogram(std::vector<double>{0.5}, 1, 0.0, 2.0);
  ASSERT_EQ(h.bins(), 1u);
  EXPECT_DOUBLE_EQ(h.densities[0], 0.5);
  EXPECT_EQ(h.edges.front(), 0.0);
  EXPECT_EQ(h.edges.back(), 2.0);
}

TEST(Histogram, Uniform) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(2, 7);
  std::vector<double> x(100000);
  for (auto& v : x) v = u(rng);
  const auto h = histogram(x, 10, 2.0, 7.0);
  for (double d : h.densities) EXPECT_NEAR(d, 0.2, 0.2 * 0.05);
  EXPECT_THROW(histogram(x, 0, 0, 1), std::invalid_argument);
  EXPECT_THROW(histogram(x, 3, 1, 1), std::invalid_argument);
}

TEST(EmpiricalCdfTest, Interpolates) {
  const EmpiricalCdf f(std::vector<double>{3, 1, 2});
  EXPECT_EQ(f(0.5), 0.0);
  EXPECT_EQ(f(3.5), 1.0);
  EXPECT_LE(f(1.5), f(2.5));
  EXPECT_GT(f(2.5), 0.0);
  EXPECT_LT(f(1.5), 1.0);
}

TEST(Median, EvenOdd) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
}
