#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "irrsde/gallery.hpp"
#include "irrsde/transform.hpp"

using namespace irrsde;

namespace {

// b = mu 1{0<x<1}, sigma = 1.
SdeProblem box_problem(double mu) {
  auto b = mu * (ClassAFn(pieces::step_up(0.0, false)) * ClassAFn(pieces::step_down(1.0, false)));
  return make_problem(make_drift(std::move(b), std::nullopt, std::abs(mu), std::abs(mu)), constant_diffusion(1.0),
                      0.0, 1.0, "box");
}

// Independent oracle: composite trapezoid of exp(-2 int_0^y b) on a fine grid.
double trapezoid_phi(double mu, double x, int cells) {
  auto integrand = [mu](double y) {
    const double inner = mu * std::clamp(y, 0.0, 1.0);  // int_0^y mu 1{0<s<1} ds for y >= 0
    return std::exp(-2.0 * (y >= 0.0 ? inner : 0.0));
  };
  const double h = x / cells;
  double s = 0.5 * (integrand(0.0) + integrand(x));
  for (int i = 1; i < cells; ++i) s += integrand(i * h);
  return s * h;
}

}  // namespace

TEST(RemovalConstant, Formula) {
  EXPECT_NEAR(removal_constant(1.0, 1.0), 7.3890560989, 1e-10);
  EXPECT_EQ(removal_constant(2.0, 0.0), 1.0);
}

TEST(Transform, IdentityForZeroDrift) {
  const auto t = build_transform(gallery_problem("G5"));
  EXPECT_EQ(t.c0(), 1.0);
  for (double x : {-3.0, -0.1, 0.0, 0.7, 5.0}) {
    EXPECT_NEAR(t.phi(x), x, 1e-14);
    EXPECT_EQ(t.f(x), 0.0);
    EXPECT_EQ(t.phi_prime(x), 1.0);
    EXPECT_EQ(t.phi_second(x), 0.0);
    EXPECT_NEAR(t.phi_inverse(x), x, 1e-10);
  }
}

TEST(Transform, ClosedFormForBoxDrift) {
  const auto t = build_transform(box_problem(1.0));
  for (double x : {0.05, 0.3, 0.5, 0.999, 1.0}) EXPECT_NEAR(t.phi(x), (1.0 - std::exp(-2.0 * x)) / 2.0, 1e-10) << x;
  for (double x : {1.5, 3.0}) EXPECT_NEAR(t.phi(x), (1.0 - std::exp(-2.0)) / 2.0 + std::exp(-2.0) * (x - 1.0), 1e-10);
  for (double x : {-2.0, -0.5}) EXPECT_NEAR(t.phi(x), x, 1e-12);
  EXPECT_NEAR(t.phi_prime(0.5), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(t.phi_inverse((1.0 - std::exp(-1.0)) / 2.0), 0.5, 1e-9);
  EXPECT_NEAR(t.c0(), std::exp(2.0 * 4.0 * 1.0), 1e-6);  // K_sigma = 2 for sigma = 1
}

TEST(Transform, AgreesWithTrapezoidOracle) {
  const auto t = build_transform(box_problem(0.7));
  for (double x : {0.2, 0.8, 1.7}) EXPECT_NEAR(t.phi(x), trapezoid_phi(0.7, x, 400000), 1e-9) << x;
}

TEST(Transform, PdeIdentityHoldsExactly) {
  for (const char* name : {"G2", "G3", "G4", "G6"}) {
    const auto p = gallery_problem(name);
    const auto t = build_transform(p);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(t.x_lo(), t.x_hi());
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng);
      const double s = p.diffusion(x);
      ASSERT_NEAR(p.drift(x) * t.phi_prime(x) + 0.5 * s * s * t.phi_second(x), 0.0, 1e-14) << name << " x=" << x;
    }
  }
}

TEST(Transform, DifferenceQuotientConvergesAtContinuityPoints) {
  const auto p = gallery_problem("G4");
  const auto t = build_transform(p);
  for (double x : {0.5, -0.4, 2.0}) {
    double prev = 1e300;
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const double err = std::abs((t.phi_prime(x + h) - t.phi_prime(x - h)) / (2 * h) - t.phi_second(x));
      EXPECT_LE(err, std::max(0.75 * prev, 1e-8)) << x << " h=" << h;
      prev = err;
    }
  }
}

TEST(Transform, SlopeBoundsAtEveryNode) {
  for (const char* name : {"G2", "G3", "G4", "G6"}) {
    const auto t = build_transform(gallery_problem(name));
    EXPECT_GE(discrete_slope_slack(t), -1e-9) << name;
    const auto& g = t.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
      ASSERT_GE(std::exp(t.f_values()[i]), 1.0 / t.c0() - 1e-9);
      ASSERT_LE(std::exp(t.f_values()[i]), t.c0() + 1e-9);
    }
  }
}

TEST(Transform, SecondDerivativeBound) {
  const auto p = gallery_problem("G4");
  const auto t = build_transform(p);
  const double bound = 2.0 * 4.0 * p.drift.sup_bound * t.c0();
  for (int i = 0; i <= 2000; ++i) {
    const double x = t.x_lo() + (t.x_hi() - t.x_lo()) * i / 2000.0;
    ASSERT_LE(std::abs(t.phi_second(x)), bound);
  }
}

TEST(Transform, InverseIsLipschitzAndRoundTrips) {
  for (const char* name : {"G2", "G4", "G6"}) {
    const auto t = build_transform(gallery_problem(name));
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(t.z_lo(), t.z_hi());
    for (int i = 0; i < 1000; ++i) {
      const double z1 = u(rng), z2 = u(rng);
      const double x1 = t.phi_inverse(z1), x2 = t.phi_inverse(z2);
      ASSERT_LE(std::abs(t.phi(x1) - z1), 10 * t.quad_tol());
      ASSERT_LE(std::abs(x1 - x2), t.c0() * std::abs(z1 - z2) + 1e-9);
      if (z1 < z2) ASSERT_LE(x1, x2);
    }
  }
}

TEST(Transform, PhiStrictlyIncreasingOnGrid) {
  const auto t = build_transform(gallery_problem("G2"));
  const auto& v = t.phi_values();
  for (std::size_t i = 1; i < v.size(); ++i) ASSERT_GT(v[i], v[i - 1]);
}

TEST(Transform, G2StartsAtZero) {
  const auto t = build_transform(gallery_problem("G2"));
  EXPECT_EQ(t.phi(0.0), 0.0);
}

TEST(Transform, RangeErrors) {
  const auto t = build_transform(gallery_problem("G4"));
  EXPECT_THROW(t.phi(t.x_hi() + 1.0), std::out_of_range);
  EXPECT_THROW(t.phi_prime(t.x_lo() - 1.0), std::out_of_range);
  EXPECT_THROW(t.phi_inverse(t.z_hi() + 1.0), std::out_of_range);
  EXPECT_EQ(t.clamp(t.x_hi() + 3.0), t.x_hi());
}

TEST(Transform, RejectsNonIntegrableDrift) {
  EXPECT_THROW(build_transform(gallery_problem("G1")), std::invalid_argument);
  auto p = gallery_problem("G1");
  p.drift = truncate_drift(p.drift, 3);
  EXPECT_NO_THROW(build_transform(p));
}

TEST(Transform, WorkingIntervalDefault) {
  const auto p = gallery_problem("G4");
  const auto w = default_working_interval(p);
  EXPECT_DOUBLE_EQ(w.hi, 1.0 + 16.0);
  EXPECT_DOUBLE_EQ(w.lo, -17.0);
}

TEST(Transform, CsvExport) {
  const auto t = build_transform(gallery_problem("G4"));
  std::ostringstream os;
  t.write_csv(os);
  const auto s = os.str();
  EXPECT_EQ(s.rfind("x,f,phi,phi_prime\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), t.grid().size() + 1);
}
