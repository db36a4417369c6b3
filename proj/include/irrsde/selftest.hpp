#pragma once

// Deterministic invariant suite behind the `selftest` verb.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "irrsde/brownian.hpp"
#include "irrsde/coefficients.hpp"
#include "irrsde/euler_maruyama.hpp"
#include "irrsde/gallery.hpp"
#include "irrsde/quadrature.hpp"
#include "irrsde/regularity.hpp"
#include "irrsde/rng.hpp"
#include "irrsde/transform.hpp"
#include "irrsde/yamada_watanabe.hpp"

namespace irrsde {

/// Fault injection for testing the suite itself.
struct SelftestHooks {
  double psi_scale = 1.0;  // multiplies psi inside the normalization check
};

struct SelftestItem {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestItem> items;

  bool passed() const {
    for (const auto& i : items)
      if (!i.passed) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& i : items) n += i.passed ? 0 : 1;
    return n;
  }
};

namespace detail {

inline std::string sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Problems with an integrable drift, so the transform exists.
inline std::vector<SdeProblem> transform_problems() {
  std::vector<SdeProblem> out{gallery_problem("G2"), gallery_problem("G3"), gallery_problem("G4"),
                              gallery_problem("G6")};
  SdeProblem g1 = gallery_problem("G1");
  g1.drift = truncate_drift(g1.drift, 3);
  g1.label = "G1[m=3]";
  out.push_back(std::move(g1));
  return out;
}

inline void check_transform(const SdeProblem& p, SelftestReport& rep, std::mt19937_64& rng) {
  const auto t = build_transform(p);
  const std::string tag = "transform[" + p.label + "].";
  std::uniform_real_distribution<double> ux(t.x_lo(), t.x_hi());
  const double k2 = p.diffusion.k_sigma * p.diffusion.k_sigma;

  double worst_identity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = ux(rng);
    const double s = p.diffusion(x);
    const double scale = std::abs(p.drift(x) * t.phi_prime(x)) + 1.0;
    worst_identity = std::max(worst_identity, std::abs(p.drift(x) * t.phi_prime(x) + 0.5 * s * s * t.phi_second(x)) / scale);
  }
  rep.items.push_back({tag + "pde_identity", worst_identity <= 1e-12, "max residual " + sci(worst_identity)});

  // Central differences of phi' approach phi'' at points away from jumps.
  bool converging = true;
  double last_err = 0.0;
  for (double x : {-0.37, 0.41, 0.73}) {
    bool near_jump = false;
    for (double bp : p.drift.breakpoints) near_jump = near_jump || std::abs(x - bp) < 0.05;
    if (near_jump) continue;
    double prev = std::numeric_limits<double>::infinity();
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const double fd = (t.phi_prime(x + h) - t.phi_prime(x - h)) / (2.0 * h);
      const double err = std::abs(fd - t.phi_second(x));
      if (!(err <= std::max(0.75 * prev, 1e-7))) converging = false;
      prev = err;
      last_err = std::max(last_err, err);
    }
  }
  rep.items.push_back({tag + "pde_difference", converging, "largest error " + sci(last_err)});

  const double slack = discrete_slope_slack(t);
  rep.items.push_back({tag + "slope_bounds", slack >= -1e-9, "min slack " + sci(slack)});

  const double second_bound = 2.0 * k2 * p.drift.sup_bound * t.c0();
  double worst_second = 0.0;
  for (int i = 0; i < 1000; ++i) worst_second = std::max(worst_second, std::abs(t.phi_second(ux(rng))));
  rep.items.push_back({tag + "second_derivative_bound", worst_second <= second_bound * (1.0 + 1e-12),
                       sci(worst_second) + " <= " + sci(second_bound)});

  std::uniform_real_distribution<double> uz(t.z_lo(), t.z_hi());
  double worst_lip = std::numeric_limits<double>::infinity();
  double worst_round = 0.0;
  bool monotone = true;
  for (int i = 0; i < 1000; ++i) {
    double z1 = uz(rng), z2 = uz(rng);
    if (z1 > z2) std::swap(z1, z2);
    const double x1 = t.phi_inverse(z1), x2 = t.phi_inverse(z2);
    worst_lip = std::min(worst_lip, t.c0() * (z2 - z1) - (x2 - x1) + 1e-9);
    worst_round = std::max({worst_round, std::abs(t.phi(x1) - z1), std::abs(t.phi(x2) - z2)});
    if (z2 > z1 && !(x2 >= x1)) monotone = false;
  }
  rep.items.push_back({tag + "inverse_lipschitz", worst_lip >= 0.0, "min slack " + sci(worst_lip)});
  rep.items.push_back({tag + "inverse_roundtrip", worst_round <= 10.0 * t.quad_tol(), "max " + sci(worst_round)});
  bool grid_monotone = true;
  const auto& v = t.phi_values();
  for (std::size_t i = 1; i < v.size(); ++i) grid_monotone = grid_monotone && v[i] > v[i - 1];
  rep.items.push_back({tag + "monotone", grid_monotone && monotone, ""});
}

inline void check_yw(const YwParams& prm, SelftestReport& rep, std::mt19937_64& rng) {
  char label[96];
  std::snprintf(label, sizeof label, "yw[delta=%.4g,eps=%.4g].", prm.delta, prm.epsilon);
  const std::string tag = label;
  const YamadaWatanabe yw(prm);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  std::uniform_real_distribution<double> ulog(std::log(prm.lower()) - 1.0, std::log(prm.epsilon) + 1.0);

  double w37 = std::numeric_limits<double>::infinity(), w38 = 0.0, odd = 0.0, w39 = 0.0;
  bool support = true;
  for (int i = 0; i < 1000; ++i) {
    // Alternate between wide samples and samples concentrated near the band.
    const double x = i % 2 == 0 ? ux(rng) : (i % 4 == 1 ? 1.0 : -1.0) * std::exp(ulog(rng));
    const double a = std::abs(x);
    w37 = std::min(w37, prm.epsilon + yw.phi(x) - a + 1e-10);
    w38 = std::max(w38, std::abs(yw.phi_prime(x)));
    odd = std::max(odd, std::abs(yw.phi_prime(x) + yw.phi_prime(-x)));
    const double s = yw.phi_second(x);
    if (a < prm.lower() || a > prm.epsilon) support = support && s == 0.0;
    else w39 = std::max(w39, s - psi_envelope(prm, a));
  }
  rep.items.push_back({tag + "abs_lower_bound", w37 >= 0.0, "min slack " + sci(w37)});
  rep.items.push_back({tag + "slope_bound", w38 <= 1.0 + 1e-12 && odd == 0.0, "max |phi'| " + sci(w38)});
  rep.items.push_back({tag + "second_derivative_envelope", support && w39 <= 1e-12, "max excess " + sci(w39)});
}

/// |int psi - 1| over random (delta, eps), by quadrature in log z.
inline void check_psi_normalization(SelftestReport& rep, std::mt19937_64& rng, double psi_scale) {
  std::uniform_real_distribution<double> log_delta(std::log(1.05), std::log(1e4));
  std::uniform_real_distribution<double> log_eps(std::log(1e-5), std::log(0.95));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto prm = make_yw_params(std::exp(log_delta(rng)), std::exp(log_eps(rng)));
    const auto q = adaptive_simpson([&](double u) { return psi_scale * psi(prm, std::exp(u)) * std::exp(u); },
                                    std::log(prm.lower()), std::log(prm.epsilon), 1e-14);
    worst = std::max(worst, std::abs(q.value - 1.0));
  }
  rep.items.push_back({"yw.psi_normalization", worst <= 1e-10, "max |int psi - 1| " + sci(worst)});
}

inline void check_coupling(SelftestReport& rep) {
  const SdeProblem p = gallery_problem("G4");
  const std::size_t n_ref = 512;
  const std::vector<std::size_t> levels{8, 32, 128, 512};
  bool exact = true;
  for (std::uint64_t stream = 0; stream < 8; ++stream) {
    const auto grid = sample_grid(p.horizon, n_ref, 99, stream);
    std::vector<EmPath> stored;
    for (auto n : levels) stored.push_back(em_path(p, grid, n));
    NormalStream normals(99, stream, StreamDomain::brownian);
    simulate_coupled(p, n_ref, levels, normals, [&](std::size_t j, std::size_t k, double x, double xr) {
      const std::size_t r = n_ref / levels[j];
      exact = exact && x == stored[j].values[k] && xr == stored.back().values[k * r];
    });
    auto halved = grid.increments;
    while (halved.size() > 8) halved = pairwise_halve(halved);
    exact = exact && halved == grid.coarsen(8);
  }
  rep.items.push_back({"coupling.bit_exact", exact, "streamed levels equal stored paths bit for bit"});
}

inline void check_cutoff(SelftestReport& rep) {
  for (int m : {1, 3, 10}) {
    const std::string tag = "cutoff[m=" + std::to_string(m) + "].";
    bool support = true, plateau = true, range = true;
    double worst_slope = 0.0;
    const double h = 1e-6;
    for (int i = -4000; i <= 4000; ++i) {
      const double x = (m + 4.0) * i / 4000.0;
      const double g = cutoff(m, x);
      if (std::abs(x) >= m + 2.0) support = support && g == 0.0;
      if (std::abs(x) <= m) plateau = plateau && g == 1.0;
      range = range && g >= 0.0 && g <= 1.0;
      worst_slope = std::max(worst_slope, std::abs(cutoff(m, x + h) - cutoff(m, x - h)) / (2.0 * h));
    }
    rep.items.push_back({tag + "support", support, ""});
    rep.items.push_back({tag + "plateau", plateau, ""});
    rep.items.push_back({tag + "range", range, ""});
    rep.items.push_back({tag + "slope", worst_slope <= 1.0 + 1e-6, "max |g'| " + sci(worst_slope)});
  }
}

inline void check_gallery(SelftestReport& rep) {
  for (const auto& e : gallery()) {
    const auto r = verify_regularity(gallery_problem(e.name), 2000, 7);
    std::string failed;
    for (const auto& c : r.checks)
      if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
    rep.items.push_back({"regularity[" + e.name + "]", r.passed(), failed.empty() ? "" : "failed: " + failed});
  }
}

}  // namespace detail

inline SelftestReport selftest(const SelftestHooks& hooks = {}) {
  SelftestReport rep;
  std::mt19937_64 rng(20220101);
  for (const auto& p : detail::transform_problems()) detail::check_transform(p, rep, rng);
  for (const auto& prm : {schedule(0.25, 16), schedule(0.25, 1 << 20), schedule(0.0, 64), schedule(0.0, 1 << 20),
                          make_yw_params(2.0, 0.5)})
    detail::check_yw(prm, rep, rng);
  detail::check_psi_normalization(rep, rng, hooks.psi_scale);
  detail::check_coupling(rep);
  detail::check_cutoff(rep);
  detail::check_gallery(rep);
  return rep;
}

inline void write_selftest(std::ostream& os, const SelftestReport& rep) {
  for (const auto& i : rep.items) {
    os << (i.passed ? "PASS " : "FAIL ") << i.name;
    if (!i.detail.empty()) os << "  " << i.detail;
    os << '\n';
  }
  os << rep.items.size() - rep.failures() << "/" << rep.items.size() << " checks passed\n";
}

}  // namespace irrsde
