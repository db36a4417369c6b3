#pragma once

// Canonical test problems. Every entry satisfies the coefficient assumptions
// (checked in the test suite with verify_regularity).
//
//   G1     b = kappa 1{x>=0}, sigma = 1              discontinuous, not integrable
//   G2     b = -clamp(x,-1,1) g_m(x), sigma = 1      class A, compact support
//   G3     b = c ((1-|x|)^+)^beta, sigma = 1          Hoelder drift only
//   G4     b = 1{0<x<1}, sigma = 1 + (|x|^1)^(1/2+alpha)   Hoelder diffusion
//   G5     b = 0, sigma = 1                           EM is exact
//   G6     b = -kappa x / (1+x^2)^2, sigma = 1        smooth bounded Lipschitz, integrable
//   CONST  b = mu, sigma = s                          EM is exact

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrsde/coefficients.hpp"

namespace irrsde {

using ParamMap = std::map<std::string, double>;

struct GalleryEntry {
  std::string name;
  std::string summary;
  ParamMap defaults;  // besides x0 and T, which every entry accepts
};

inline const std::vector<GalleryEntry>& gallery() {
  static const std::vector<GalleryEntry> entries{
      {"G1", "b = kappa*1{x>=0}, sigma = 1 (discontinuous drift, not in L1)", {{"kappa", 1.0}}},
      {"G2", "b = -clamp(x,-1,1)*g_m(x), sigma = 1 (class A, compact support)", {{"m", 1.0}}},
      {"G3", "b = c*((1-|x|)^+)^beta, sigma = 1 (Hoelder drift)", {{"beta", 0.5}, {"c", 1.0}}},
      {"G4", "b = 1{0<x<1}, sigma = 1 + min(|x|,1)^(1/2+alpha) (Hoelder diffusion)", {{"alpha", 0.25}}},
      {"G5", "b = 0, sigma = 1 (Brownian motion, EM exact)", {}},
      {"G6", "b = -kappa*x/(1+x^2)^2, sigma = 1 (bounded Lipschitz, in L1)", {{"kappa", 1.0}}},
      {"CONST", "b = mu, sigma = s (constant coefficients, EM exact)", {{"mu", 0.5}, {"s", 1.0}}},
  };
  return entries;
}

inline std::string gallery_listing() {
  std::string out;
  for (const auto& e : gallery()) out += (out.empty() ? "" : ", ") + e.name;
  return out;
}

namespace detail {

inline double take(const ParamMap& p, const std::string& key) { return p.at(key); }

}  // namespace detail

/// Builds a gallery problem; `overrides` may set the entry's parameters and
/// x0 / T. Unknown names or keys are rejected.
inline SdeProblem gallery_problem(const std::string& name, const ParamMap& overrides = {}) {
  const GalleryEntry* entry = nullptr;
  for (const auto& e : gallery())
    if (e.name == name) entry = &e;
  if (!entry) throw std::invalid_argument("unknown gallery problem '" + name + "'; available: " + gallery_listing());

  ParamMap p = entry->defaults;
  p["x0"] = 0.0;
  p["T"] = 1.0;
  for (const auto& [key, value] : overrides) {
    if (!p.count(key))
      throw std::invalid_argument("gallery problem " + name + " has no parameter '" + key + "'");
    p[key] = value;
  }
  const double x0 = p["x0"];
  const double horizon = p["T"];
  using detail::take;

  if (name == "G1") {
    const double kappa = take(p, "kappa");
    auto drift = make_drift(kappa * ClassAFn(pieces::step_up(0.0, true)), std::nullopt, std::nullopt);
    return make_problem(std::move(drift), constant_diffusion(1.0), x0, horizon, name);
  }
  if (name == "G2") {
    const double mr = take(p, "m");
    const int m = static_cast<int>(mr);
    if (m < 1 || m != mr) throw std::invalid_argument("G2: m must be a positive integer");
    auto b = (-1.0 * ClassAFn(pieces::clamp(-1.0, 1.0))) * cutoff_class_a(m);
    // |b| = |x| on [0,1], 1 on [1,m], ramp of integral 1 on [m,m+2].
    const double l1 = 2.0 * (0.5 + (m - 1.0) + 1.0);
    auto drift = make_drift(std::move(b), std::nullopt, l1, 1.0);
    return make_problem(std::move(drift), constant_diffusion(1.0), x0, horizon, name);
  }
  if (name == "G3") {
    const double beta = take(p, "beta");
    const double c = take(p, "c");
    auto h = make_hoelder([beta, c](double x) { return c * std::pow(std::max(1.0 - std::abs(x), 0.0), beta); },
                          beta, 2.0 * std::abs(c));
    auto drift = make_drift(std::nullopt, std::move(h), 2.0 * std::abs(c) / (beta + 1.0), std::abs(c));
    return make_problem(std::move(drift), constant_diffusion(1.0), x0, horizon, name);
  }
  if (name == "G4") {
    const double alpha = take(p, "alpha");
    auto b = ClassAFn(pieces::step_up(0.0, false)) * ClassAFn(pieces::step_down(1.0, false));
    auto drift = make_drift(std::move(b), std::nullopt, 1.0, 1.0);
    const double e = 0.5 + alpha;
    auto sigma = make_diffusion(
        [e](double x) { return std::clamp(1.0 + std::pow(std::min(std::abs(x), 1.0), e), 1.0, 2.0); }, 2.0, alpha);
    return make_problem(std::move(drift), std::move(sigma), x0, horizon, name);
  }
  if (name == "G5") {
    return make_problem(make_drift(std::nullopt, std::nullopt, 0.0), constant_diffusion(1.0), x0, horizon, name);
  }
  if (name == "G6") {
    const double kappa = take(p, "kappa");
    // sup |x/(1+x^2)^2| = 9/(16 sqrt 3) at x^2 = 1/3; Lipschitz constant 1 (at 0).
    const double sup = std::abs(kappa) * 9.0 / (16.0 * std::sqrt(3.0));
    auto h = make_hoelder(
        [kappa](double x) {
          const double q = 1.0 + x * x;
          return -kappa * x / (q * q);
        },
        1.0, sup + std::abs(kappa));
    auto drift = make_drift(std::nullopt, std::move(h), std::abs(kappa), sup);
    return make_problem(std::move(drift), constant_diffusion(1.0), x0, horizon, name);
  }
  // CONST
  const double mu = take(p, "mu");
  const double s = take(p, "s");
  if (!(s > 0.0)) throw std::invalid_argument("CONST: s must be positive");
  const double k = std::max({2.0, s, 1.0 / s});
  std::optional<ClassAFn> b;
  if (mu != 0.0) b = ClassAFn(pieces::constant(mu));
  auto drift = make_drift(std::move(b), std::nullopt, mu == 0.0 ? std::optional<double>(0.0) : std::nullopt);
  return make_problem(std::move(drift), constant_diffusion(s, k), x0, horizon, name);
}

}  // namespace irrsde
