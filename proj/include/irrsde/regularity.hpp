#pragma once

// Empirical validation of the coefficient assumptions by sampling. Failing
// checks are reported, never thrown: validation is advisory.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrsde/coefficients.hpp"
#include "irrsde/quadrature.hpp"
#include "irrsde/rng.hpp"

namespace irrsde {

struct RegularityCheck {
  std::string name;
  bool passed = true;
  double worst_slack = std::numeric_limits<double>::infinity();  // negative = violation
  double x = 0.0;
  double y = 0.0;
  std::size_t evaluated = 0;
};

struct RegularityReport {
  std::vector<RegularityCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  const RegularityCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline constexpr double kRegularitySlack = 1e-9;
inline constexpr double kSamplingRadius = 10.0;

namespace detail {

struct CheckAccumulator {
  RegularityCheck check;

  explicit CheckAccumulator(std::string name) { check.name = std::move(name); }

  void observe(double slack, double x, double y = 0.0) {
    ++check.evaluated;
    if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
    if (slack < check.worst_slack) {
      check.worst_slack = slack;
      check.x = x;
      check.y = y;
    }
  }
  RegularityCheck finish() {
    check.passed = check.worst_slack >= -kRegularitySlack;
    return check;
  }
};

/// Points: uniform on [-R, R] mixed with Cauchy tails. Partners: independent
/// uniform, Cauchy, or a close neighbour at a log-uniform distance in
/// [1e-8, 1] to stress small scales.
struct PairSampler {
  NormalStream rng;

  explicit PairSampler(std::uint64_t seed) : rng(seed, 0, StreamDomain::sampling) {}

  double point() {
    const double u = rng.uniform();
    if (u < 0.75) return kSamplingRadius * (2.0 * rng.uniform() - 1.0);
    return kSamplingRadius * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
  }

  std::pair<double, double> pair() {
    const double x = point();
    const double u = rng.uniform();
    if (u < 1.0 / 3.0) return {x, point()};
    if (u < 2.0 / 3.0) return {x, x + std::pow(10.0, -8.0 * rng.uniform()) * (rng.uniform() < 0.5 ? -1 : 1)};
    return {x, kSamplingRadius * (2.0 * rng.uniform() - 1.0)};
  }
};

}  // namespace detail

/// Checks ellipticity, boundedness and Hoelder inequalities of the problem's
/// coefficients on `samples` sampled pairs, monotonicity and bounds of every
/// class-A piece, and the declared L1 norm by quadrature.
inline RegularityReport verify_regularity(const SdeProblem& problem, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("verify_regularity: need at least 2 samples");
  detail::PairSampler sampler(seed);
  std::vector<std::pair<double, double>> pairs(samples);
  for (auto& p : pairs) p = sampler.pair();

  RegularityReport report;

  {
    detail::CheckAccumulator horizon("problem.horizon");
    horizon.observe(problem.horizon, problem.horizon);
    report.checks.push_back(horizon.finish());
  }

  const DiffusionSpec& sigma = problem.diffusion;
  const double k = sigma.k_sigma;
  const double sigma_exponent = 0.5 + sigma.alpha;
  detail::CheckAccumulator ellipticity("diffusion.ellipticity");
  detail::CheckAccumulator sigma_hoelder("diffusion.hoelder");
  for (auto [x, y] : pairs) {
    const double sx = sigma(x);
    const double sy = sigma(y);
    const double s2 = sx * sx;
    ellipticity.observe(std::min(s2 - 1.0 / (k * k), k * k - s2), x);
    sigma_hoelder.observe(k * std::pow(std::abs(x - y), sigma_exponent) - std::abs(sx - sy), x, y);
  }
  report.checks.push_back(ellipticity.finish());
  report.checks.push_back(sigma_hoelder.finish());

  const DriftSpec& drift = problem.drift;
  detail::CheckAccumulator drift_bound("drift.sup_bound");
  for (auto [x, y] : pairs) {
    drift_bound.observe(drift.sup_bound - std::abs(drift(x)), x);
    drift_bound.observe(drift.sup_bound - std::abs(drift(y)), y);
  }
  report.checks.push_back(drift_bound.finish());

  if (drift.class_a_part) {
    const ClassAFn& za = *drift.class_a_part;
    detail::CheckAccumulator bound("class_a.sup_bound");
    for (auto [x, y] : pairs) bound.observe(za.sup_bound() - std::abs(za(x)), x);
    report.checks.push_back(bound.finish());

    std::vector<double> sorted;
    sorted.reserve(2 * pairs.size());
    for (auto [x, y] : pairs) {
      sorted.push_back(x);
      sorted.push_back(y);
    }
    std::sort(sorted.begin(), sorted.end());
    for (const auto& piece : za.pieces()) {
      detail::CheckAccumulator mono("class_a.monotone[" + piece.label + "]");
      detail::CheckAccumulator pbound("class_a.piece_bound[" + piece.label + "]");
      double prev = piece.evaluate(sorted.front());
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        const double v = piece.evaluate(sorted[i]);
        const double step = piece.increasing ? v - prev : prev - v;
        mono.observe(step, sorted[i - 1], sorted[i]);
        pbound.observe(piece.bound - std::abs(v), sorted[i]);
        prev = v;
      }
      report.checks.push_back(mono.finish());
      report.checks.push_back(pbound.finish());
    }
  }

  if (drift.hoelder_part) {
    const HoelderFn& h = *drift.hoelder_part;
    detail::CheckAccumulator bound("hoelder.sup_bound");
    detail::CheckAccumulator cont("hoelder.continuity");
    for (auto [x, y] : pairs) {
      const double hx = h(x);
      const double hy = h(y);
      bound.observe(h.hoelder_norm - std::abs(hx), x);
      cont.observe(h.hoelder_norm * std::pow(std::abs(x - y), h.beta) - std::abs(hx - hy), x, y);
    }
    report.checks.push_back(bound.finish());
    report.checks.push_back(cont.finish());
  }

  if (drift.l1_norm) {
    detail::CheckAccumulator l1("drift.l1_norm");
    constexpr double kWide = 200.0;
    constexpr double kTol = 1e-8;
    std::vector<double> cuts = drift.breakpoints;
    for (double c = -kWide; c <= kWide; c += 1.0) cuts.push_back(c);
    const auto q = integrate_piecewise([&](double x) { return std::abs(drift(x)); }, -kWide, kWide, cuts, kTol);
    l1.observe(*drift.l1_norm + 1e3 * kTol - q.value, q.value);
    report.checks.push_back(l1.finish());
  }

  return report;
}

}  // namespace irrsde
