#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "irrsde/quadrature.hpp"
#include "irrsde/yamada_watanabe.hpp"

using namespace irrsde;

namespace {

// Integral of psi over its support, in the variable u = log z.
double psi_mass(const YwParams& p) {
  return adaptive_simpson([&](double u) { return psi(p, std::exp(u)) * std::exp(u); }, std::log(p.lower()),
                          std::log(p.epsilon), 1e-14)
      .value;
}

// phi by brute-force nested quadrature.
double phi_oracle(const YwParams& p, double x) {
  const double a = std::abs(x);
  auto inner = [&](double y) {
    if (y <= p.lower()) return 0.0;
    return adaptive_simpson([&](double z) { return psi(p, z); }, p.lower(), std::min(y, p.epsilon), 1e-14).value;
  };
  const double lo = std::min(a, p.lower());
  const double band_hi = std::min(a, p.epsilon);
  double v = adaptive_simpson(inner, lo, band_hi, 1e-13).value;
  if (a > p.epsilon) v += a - p.epsilon;
  return v;
}

std::vector<YwParams> random_params(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_delta(std::log(1.05), std::log(1e4));
  std::uniform_real_distribution<double> log_eps(std::log(1e-5), std::log(0.95));
  std::vector<YwParams> out;
  for (int i = 0; i < count; ++i) out.push_back(make_yw_params(std::exp(log_delta(rng)), std::exp(log_eps(rng))));
  return out;
}

}  // namespace

TEST(YwParams, Validation) {
  EXPECT_THROW(make_yw_params(1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(make_yw_params(2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(make_yw_params(2.0, 0.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(make_yw_params(4.0, 0.5).lower(), 0.125);
}

TEST(Psi, SupportEndpointsAndMidpoint) {
  const auto p = make_yw_params(2.0, 0.5);
  EXPECT_NEAR(psi(p, 0.25), 0.0, 1e-15);
  EXPECT_NEAR(psi(p, 0.5), 0.0, 1e-15);
  EXPECT_EQ(psi(p, 0.1), 0.0);
  EXPECT_EQ(psi(p, 0.7), 0.0);
  const double mid = std::sqrt(0.25 / 2.0);
  EXPECT_NEAR(psi(p, mid), 2.0 / (mid * std::log(2.0)), 1e-12);
}

TEST(Psi, NormalizedForDocumentedCase) {
  const auto p = make_yw_params(2.0, 0.5);
  EXPECT_NEAR(adaptive_simpson([&](double z) { return psi(p, z); }, 0.25, 0.5, 1e-14).value, 1.0, 1e-10);
}

TEST(Psi, NormalizedAndDominatedForRandomParams) {
  for (const auto& p : random_params(100, 42)) {
    EXPECT_NEAR(psi_mass(p), 1.0, 1e-10) << p.delta << " " << p.epsilon;
    EXPECT_NEAR(psi_antiderivative(p, p.epsilon), 1.0, 1e-15);
    for (int i = 0; i <= 200; ++i) {
      const double z = p.lower() * std::pow(p.delta, i / 200.0);
      ASSERT_GE(psi(p, z), 0.0);
      ASSERT_LE(psi(p, z), psi_envelope(p, z) + 1e-12);
    }
  }
}

TEST(YamadaWatanabe, ValuesAtOrigin) {
  const YamadaWatanabe yw(make_yw_params(2.0, 0.5));
  EXPECT_EQ(yw_phi(yw, 0.0), 0.0);
  EXPECT_EQ(yw_phi_prime(yw, 0.0), 0.0);
  EXPECT_EQ(yw_phi_second(yw, 0.0), 0.0);
}

TEST(YamadaWatanabe, SaturatedSlopeOutsideBand) {
  const YamadaWatanabe yw(make_yw_params(3.0, 0.2));
  for (double x : {0.2, 0.5, 3.0}) {
    EXPECT_NEAR(yw.phi_prime(x), 1.0, 1e-15);
    EXPECT_NEAR(yw.phi_prime(-x), -1.0, 1e-15);
  }
}

TEST(YamadaWatanabe, DocumentedLowerBoundAtOne) {
  const auto p = make_yw_params(2.0, 0.5);
  const YamadaWatanabe yw(p);
  EXPECT_GE(yw.phi(1.0), 0.5);
  EXPECT_NEAR(yw.phi(1.0), phi_oracle(p, 1.0), 1e-11);
}

TEST(YamadaWatanabe, MatchesNestedQuadratureOracle) {
  for (const auto& p : random_params(8, 7)) {
    const YamadaWatanabe yw(p);
    for (double frac : {0.3, 0.7, 0.95}) {
      const double x = p.lower() + frac * (p.epsilon - p.lower());
      EXPECT_NEAR(yw.phi(x), phi_oracle(p, x), 1e-12 + 1e-9 * x) << p.delta << " " << p.epsilon << " " << x;
      EXPECT_NEAR(yw.phi(-x), yw.phi(x), 0.0);
    }
    EXPECT_NEAR(yw.phi(2.0 * p.epsilon), phi_oracle(p, 2.0 * p.epsilon), 1e-11);
  }
}

TEST(YamadaWatanabe, Properties37To39) {
  std::mt19937_64 rng(3);
  for (const auto& p : random_params(20, 11)) {
    const YamadaWatanabe yw(p);
    std::uniform_real_distribution<double> wide(-2.0, 2.0);
    std::uniform_real_distribution<double> band(std::log(p.lower()) - 0.5, std::log(p.epsilon) + 0.5);
    for (int i = 0; i < 1000; ++i) {
      const double x = i % 2 ? wide(rng) : std::exp(band(rng)) * (i % 4 ? 1.0 : -1.0);
      const double a = std::abs(x);
      ASSERT_LE(a, p.epsilon + yw.phi(x) + 1e-10);
      ASSERT_LE(std::abs(yw.phi_prime(x)), 1.0 + 1e-12);
      ASSERT_EQ(yw.phi_prime(-x), -yw.phi_prime(x));
      const double s = yw.phi_second(x);
      if (a < p.lower() || a > p.epsilon) ASSERT_EQ(s, 0.0);
      else ASSERT_LE(s, 2.0 / (a * std::log(p.delta)) + 1e-12);
    }
  }
}

TEST(YamadaWatanabe, FiniteDifferenceConsistency) {
  const auto p = make_yw_params(2.0, 0.5);
  const YamadaWatanabe yw(p);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.26, 0.49);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    const double e1 = std::abs((yw.phi_prime(x + 1e-3) - yw.phi_prime(x - 1e-3)) / 2e-3 - yw.phi_second(x));
    const double e2 = std::abs((yw.phi(x + 1e-3) - 2 * yw.phi(x) + yw.phi(x - 1e-3)) / 1e-6 - yw.phi_second(x));
    ASSERT_LT(e1, 1e-3);
    ASSERT_LT(e2, 1e-3);
  }
}

TEST(Schedule, DocumentedValues) {
  auto a = schedule(0.5, 100);
  EXPECT_EQ(a.delta, 2.0);
  EXPECT_DOUBLE_EQ(a.epsilon, 0.1);
  auto b = schedule(0.0, 20);
  EXPECT_NEAR(b.delta, 2.714417616594907, 1e-12);
  EXPECT_NEAR(b.epsilon, 0.33380820069533, 1e-12);
  auto c = schedule(0.25, 10000);
  EXPECT_EQ(c.delta, 2.0);
  EXPECT_DOUBLE_EQ(c.epsilon, 0.01);
  EXPECT_THROW(schedule(0.25, 2), std::invalid_argument);
  EXPECT_THROW(schedule(0.6, 100), std::invalid_argument);
}

TEST(YamadaWatanabe, CsvExport) {
  const YamadaWatanabe yw(make_yw_params(2.0, 0.5));
  std::ostringstream os;
  yw.write_csv(os, 1.0, 11);
  EXPECT_EQ(os.str().rfind("x,phi,phi_prime,phi_second\n", 0), 0u);
}
