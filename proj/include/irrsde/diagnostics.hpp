#pragma once

// Monte Carlo statistics of the EM scheme between grid points, and the
// driftless-martingale check of the removal-of-drift transform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrsde/coefficients.hpp"
#include "irrsde/error_stats.hpp"
#include "irrsde/parallel.hpp"
#include "irrsde/rng.hpp"
#include "irrsde/transform.hpp"

namespace irrsde {

struct DiagnosticOptions {
  std::size_t threads = 0;
  std::size_t chunk = 256;
};

namespace detail {

/// Rejects a diffusion that is not uniformly elliptic on a probe grid.
inline void require_elliptic(const SdeProblem& p) {
  const double k2 = p.diffusion.k_sigma * p.diffusion.k_sigma;
  for (int i = -400; i <= 400; ++i) {
    const double x = p.x0 + i / 40.0;
    const double s = p.diffusion(x);
    if (!(s * s >= 1.0 / k2 - 1e-12))
      throw std::invalid_argument("diffusion is not uniformly elliptic (sigma^2 < 1/K^2 near x=" + std::to_string(x) +
                                  ")");
  }
}

template <class PerPath>
std::vector<double> per_path_values(std::size_t paths, const DiagnosticOptions& opt, PerPath&& per_path) {
  std::vector<double> values(paths);
  parallel_for_chunks(paths, resolve_workers(opt.threads), opt.chunk, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = per_path(i);
  });
  return values;
}

inline ErrorEstimate diagnostic_estimate(std::size_t n, std::span<const double> values) {
  const auto s = summarize(values);
  return ErrorEstimate{n, Norm{NormKind::diagnostic, 1.0}, s.mean, s.std_error, values.size(), {}, {}};
}

}  // namespace detail

/// Time-averaged E|X_{t_k + h/2} - X_{t_k}|^q over the n steps. The midpoint
/// value comes from the Brownian bridge between grid points.
inline ErrorEstimate modulus_stat(const SdeProblem& problem, std::size_t n, double q, std::size_t paths,
                                  std::uint64_t seed, const DiagnosticOptions& opt = {}) {
  if (!(q > 0.0)) throw std::invalid_argument("modulus_stat: q must be positive");
  if (n == 0 || paths < 2) throw std::invalid_argument("modulus_stat: need n >= 1 and paths >= 2");
  detail::require_elliptic(problem);
  const double h = problem.horizon / static_cast<double>(n);
  const double scale = std::sqrt(h);
  const double bridge_sd = std::sqrt(h / 4.0);
  const auto values = detail::per_path_values(paths, opt, [&](std::size_t path) {
    NormalStream normals(seed, path, StreamDomain::brownian);
    NormalStream aux(seed, path, StreamDomain::auxiliary);
    double x = problem.x0;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double dw = scale * normals();
      const double half = 0.5 * dw + bridge_sd * aux();
      const double bx = problem.drift(x);
      const double sx = problem.diffusion(x);
      acc += std::pow(std::abs(bx * 0.5 * h + sx * half), q);
      x = x + bx * h + sx * dw;
    }
    return acc / static_cast<double>(n);
  });
  return detail::diagnostic_estimate(n, values);
}

/// int_0^T E|zeta(X_s) - zeta(X_{eta(s)})|^q ds, with one uniform time per
/// step and path (unbiased for the time integral).
template <class Zeta>
ErrorEstimate class_a_increment_stat(const SdeProblem& problem, const Zeta& zeta, std::size_t n, double q,
                                     std::size_t paths, std::uint64_t seed, const DiagnosticOptions& opt = {}) {
  if (!(q >= 1.0)) throw std::invalid_argument("class_a_increment_stat: q must be >= 1");
  if (n == 0 || paths < 2) throw std::invalid_argument("class_a_increment_stat: need n >= 1 and paths >= 2");
  detail::require_elliptic(problem);
  const double h = problem.horizon / static_cast<double>(n);
  const double scale = std::sqrt(h);
  const auto values = detail::per_path_values(paths, opt, [&](std::size_t path) {
    NormalStream normals(seed, path, StreamDomain::brownian);
    NormalStream aux(seed, path, StreamDomain::auxiliary);
    double x = problem.x0;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double dw = scale * normals();
      const double u = aux.uniform();
      const double partial = u * dw + std::sqrt(u * (1.0 - u) * h) * aux();
      const double bx = problem.drift(x);
      const double sx = problem.diffusion(x);
      const double xs = x + bx * u * h + sx * partial;
      const double d = std::abs(zeta(xs) - zeta(x));
      acc += q == 1.0 ? d : std::pow(d, q);
      x = x + bx * h + sx * dw;
    }
    return acc * h;
  });
  return detail::diagnostic_estimate(n, values);
}

struct MartingaleReport {
  double mean = 0.0;  // E[phi(X_T^(n))] - phi(x0)
  double std_error = 0.0;
  double z_score = 0.0;
  std::size_t paths = 0;
  std::size_t clamp_count = 0;
};

/// phi(X) is driftless, so E[phi(X_T)] = phi(x0) up to the scheme's bias.
inline MartingaleReport martingale_diagnostic(const SdeProblem& problem, const TransformTables& tables,
                                              std::size_t n_fine, std::size_t paths, std::uint64_t seed,
                                              const DiagnosticOptions& opt = {}) {
  if (n_fine == 0 || paths < 2) throw std::invalid_argument("martingale_diagnostic: need n >= 1 and paths >= 2");
  const double phi0 = tables.phi(problem.x0);
  const double h = problem.horizon / static_cast<double>(n_fine);
  const double scale = std::sqrt(h);
  const WorkingInterval box{tables.x_lo(), tables.x_hi()};
  std::vector<std::size_t> clamps(paths, 0);
  const auto values = detail::per_path_values(paths, opt, [&](std::size_t path) {
    NormalStream normals(seed, path, StreamDomain::brownian);
    double x = problem.x0;
    for (std::size_t k = 0; k < n_fine; ++k) {
      x = x + problem.drift(x) * h + problem.diffusion(x) * (scale * normals());
      if (x < box.lo || x > box.hi) {
        x = std::clamp(x, box.lo, box.hi);
        ++clamps[path];
      }
    }
    return tables.phi(x) - phi0;
  });
  const auto s = summarize(values);
  MartingaleReport r;
  r.mean = s.mean;
  r.std_error = s.std_error;
  r.paths = paths;
  r.z_score = s.std_error > 0.0 ? s.mean / s.std_error : 0.0;
  for (auto c : clamps) r.clamp_count += c;
  return r;
}

}  // namespace irrsde
