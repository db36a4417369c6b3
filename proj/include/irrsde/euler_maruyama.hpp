#pragma once

// Euler-Maruyama: X_{k+1} = X_k + b(X_k) h + sigma(X_k) dW_k with h = T/n.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "irrsde/brownian.hpp"
#include "irrsde/coefficients.hpp"
#include "irrsde/rng.hpp"
#include "irrsde/transform.hpp"

namespace irrsde {

struct EmPath {
  std::size_t n = 0;
  double horizon = 1.0;
  std::vector<double> values;  // X at t_k = k T / n, k = 0..n
  std::size_t clamp_count = 0;
};

inline double em_step(const SdeProblem& p, double x, double h, double dw) {
  return x + p.drift(x) * h + p.diffusion(x) * dw;
}

/// n-step path driven by the grid's coarsened increments. With a working
/// interval, states leaving it are clamped back and counted.
inline EmPath em_path(const SdeProblem& problem, const BrownianGrid& grid, std::size_t n,
                      const WorkingInterval* clamp_to = nullptr) {
  const auto dw = grid.coarsen(n);
  EmPath path;
  path.n = n;
  path.horizon = grid.t_horizon;
  path.values.resize(n + 1);
  const double h = grid.t_horizon / static_cast<double>(n);
  double x = problem.x0;
  path.values[0] = x;
  for (std::size_t k = 0; k < n; ++k) {
    x = em_step(problem, x, h, dw[k]);
    if (clamp_to && (x < clamp_to->lo || x > clamp_to->hi)) {
      x = std::clamp(x, clamp_to->lo, clamp_to->hi);
      ++path.clamp_count;
    }
    path.values[k + 1] = x;
  }
  return path;
}

/// max over the coarser grid's times of |a(t) - b(t)|.
inline double path_sup_distance(const EmPath& a, const EmPath& b) {
  if (a.horizon != b.horizon) throw std::invalid_argument("path_sup_distance: horizons differ");
  const EmPath& coarse = a.n <= b.n ? a : b;
  const EmPath& fine = a.n <= b.n ? b : a;
  if (coarse.n == 0 || fine.n % coarse.n != 0)
    throw std::invalid_argument("path_sup_distance: grids are not nested");
  const std::size_t r = fine.n / coarse.n;
  double worst = 0.0;
  for (std::size_t k = 0; k <= coarse.n; ++k)
    worst = std::max(worst, std::abs(coarse.values[k] - fine.values[k * r]));
  return worst;
}

namespace detail {

template <class Sigma, class Visitor>
void coupled_loop(const SdeProblem& p, const Sigma& sigma, std::size_t n_ref, std::span<const std::size_t> levels,
                  NormalStream& normals, Visitor& visit) {
  const std::size_t n_levels = levels.size();
  std::vector<int> depth(n_levels);
  int max_depth = 0;
  for (std::size_t j = 0; j < n_levels; ++j) {
    depth[j] = dyadic_depth(n_ref, levels[j]);
    max_depth = std::max(max_depth, depth[j]);
  }
  std::vector<int> level_at_depth(static_cast<std::size_t>(max_depth) + 1, -1);
  for (std::size_t j = 0; j < n_levels; ++j) {
    if (level_at_depth[depth[j]] != -1) throw std::invalid_argument("simulate_coupled: duplicate level");
    level_at_depth[depth[j]] = static_cast<int>(j);
  }

  const double T = p.horizon;
  const double h_ref = T / static_cast<double>(n_ref);
  const double scale = std::sqrt(h_ref);
  std::vector<double> h(n_levels), x(n_levels, p.x0);
  std::vector<std::size_t> k(n_levels, 0);
  for (std::size_t j = 0; j < n_levels; ++j) h[j] = T / static_cast<double>(levels[j]);

  const DriftSpec& b = p.drift;
  double xr = p.x0;
  DyadicAccumulator tree(max_depth);
  auto step_level = [&](int d, double dw) {
    const int j = level_at_depth[d];
    if (j < 0) return;
    double& xj = x[j];
    xj = xj + b(xj) * h[j] + sigma(xj) * dw;
    visit(static_cast<std::size_t>(j), ++k[j], xj, xr);
  };
  for (std::size_t i = 0; i < n_ref; ++i) {
    const double dw = scale * normals();
    xr = xr + b(xr) * h_ref + sigma(xr) * dw;
    step_level(0, dw);
    tree.push(dw, step_level);
  }
}

}  // namespace detail

/// Runs the reference path (n_ref steps) and every coarser level on one
/// Brownian path, streaming. After each level step,
/// visit(level, k, X^{(n)}_{t_k}, X^{(n_ref)}_{t_k}) is called; the
/// reference has already advanced to the same time. Increments are
/// generated exactly as sample_grid(T, n_ref, seed, stream) would.
template <class Visitor>
void simulate_coupled(const SdeProblem& p, std::size_t n_ref, std::span<const std::size_t> levels,
                      NormalStream& normals, Visitor&& visit) {
  if (p.diffusion.constant) {
    const double s = *p.diffusion.constant;
    detail::coupled_loop(p, [s](double) { return s; }, n_ref, levels, normals, visit);
  } else {
    const RealFn& fn = p.diffusion.evaluate;
    detail::coupled_loop(p, [&fn](double y) { return fn(y); }, n_ref, levels, normals, visit);
  }
}

// ---------------------------------------------------------------------------
// Binary path dump, little-endian:
//   f64 T, u64 n, u64 count, then count * (n + 1) f64 values, path-major.

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("path dump: truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
  return v;
}

}  // namespace detail

inline void write_path_dump(std::ostream& os, std::span<const EmPath> paths) {
  if (paths.empty()) throw std::invalid_argument("write_path_dump: no paths");
  const std::size_t n = paths.front().n;
  detail::put_u64(os, std::bit_cast<std::uint64_t>(paths.front().horizon));
  detail::put_u64(os, n);
  detail::put_u64(os, paths.size());
  for (const auto& p : paths) {
    if (p.n != n || p.values.size() != n + 1) throw std::invalid_argument("write_path_dump: mixed step counts");
    for (double v : p.values) detail::put_u64(os, std::bit_cast<std::uint64_t>(v));
  }
}

inline std::vector<EmPath> read_path_dump(std::istream& is) {
  const double horizon = std::bit_cast<double>(detail::get_u64(is));
  const std::uint64_t n = detail::get_u64(is);
  const std::uint64_t count = detail::get_u64(is);
  std::vector<EmPath> out(count);
  for (auto& p : out) {
    p.n = n;
    p.horizon = horizon;
    p.values.resize(n + 1);
    for (auto& v : p.values) v = std::bit_cast<double>(detail::get_u64(is));
  }
  return out;
}

}  // namespace irrsde
