#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "irrsde/interpolation.hpp"
#include "irrsde/quadrature.hpp"

using namespace irrsde;

TEST(AdaptiveSimpson, SmoothIntegrands) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12).value, 2.0, 1e-11);
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::exp(-x * x); }, -6.0, 6.0, 1e-12).value,
              std::sqrt(std::numbers::pi), 1e-11);
}

TEST(AdaptiveSimpson, ReversedLimitsChangeSign) {
  const auto f = [](double x) { return x * x; };
  EXPECT_NEAR(adaptive_simpson(f, 1.0, 0.0, 1e-12).value, -1.0 / 3.0, 1e-13);
}

TEST(AdaptiveSimpson, OneSidedEndpointsIgnoreConventionAtJump) {
  // The value at x = 0 is the "wrong" side of the jump.
  const auto step = [](double x) { return x > 0.0 ? 1.0 : 100.0; };
  EXPECT_NEAR(adaptive_simpson(step, 0.0, 1.0, 1e-12, true).value, 1.0, 1e-12);
}

TEST(IntegratePiecewise, StepFunctionExact) {
  const auto step = [](double x) { return x >= 0.3 ? 2.0 : -1.0; };
  const std::vector<double> cuts{0.3};
  EXPECT_NEAR(integrate_piecewise(step, -1.0, 1.0, cuts, 1e-12).value, -1.3 + 1.4, 1e-12);
  EXPECT_NEAR(integrate_piecewise(step, 1.0, -1.0, cuts, 1e-12).value, -0.1, 1e-12);
}

TEST(IntegratePiecewise, KinkedAbsoluteValue) {
  const std::vector<double> cuts{0.0};
  EXPECT_NEAR(integrate_piecewise([](double x) { return std::sqrt(std::abs(x)); }, -1.0, 1.0, cuts, 1e-11).value,
              4.0 / 3.0, 1e-9);
}

TEST(LocateCell, ClampsAndFinds) {
  const std::vector<double> g{0.0, 1.0, 2.0, 4.0};
  EXPECT_EQ(locate_cell(g, 0.0), 0u);
  EXPECT_EQ(locate_cell(g, 1.5), 1u);
  EXPECT_EQ(locate_cell(g, 4.0), 2u);
  EXPECT_DOUBLE_EQ(linear_interpolate(g, {0.0, 2.0, 4.0, 8.0}, 3.0), 6.0);
}

TEST(MonotoneCubic, ReproducesCubicWithExactSlopes) {
  std::vector<double> x, y, d;
  for (int i = 0; i <= 20; ++i) {
    const double t = i / 10.0;
    x.push_back(t);
    y.push_back(t * t * t + t);
    d.push_back(3 * t * t + 1);
  }
  MonotoneCubic c(x, y, d);
  for (double t : {0.05, 0.77, 1.33, 1.99}) {
    EXPECT_NEAR(c(t), t * t * t + t, 1e-12);
    EXPECT_NEAR(c.derivative(t), 3 * t * t + 1, 1e-10);
  }
  EXPECT_EQ(c.limited_count(), 0u);
}

TEST(MonotoneCubic, StaysMonotoneForSteepData) {
  std::vector<double> x{0, 1, 2, 3, 4}, y{0, 0, 0.01, 5, 5};
  std::vector<double> d{0, 0, 10, 10, 0};  // slopes that would overshoot
  MonotoneCubic c(x, y, d);
  double prev = c(0.0);
  for (int i = 1; i <= 4000; ++i) {
    const double v = c(i / 1000.0);
    ASSERT_GE(v, prev - 1e-15);
    prev = v;
  }
  EXPECT_GT(c.limited_count(), 0u);
}
