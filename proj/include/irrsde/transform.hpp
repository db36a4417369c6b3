#pragma once

// Removal-of-drift transform.
//
//   f(x)   = -2 int_0^x b / sigma^2
//   phi(x) = int_0^x exp(f)
//
// phi solves b phi' + sigma^2 phi'' / 2 = 0, so phi(X) is a driftless
// martingale. Both integrals are tabulated on a working interval; declared
// drift jumps are grid nodes, so every quadrature cell sees a smooth
// integrand.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrsde/coefficients.hpp"
#include "irrsde/interpolation.hpp"
#include "irrsde/quadrature.hpp"

namespace irrsde {

inline constexpr double kDefaultQuadTol = 1e-10;

/// C_0 = exp(2 K_sigma^2 ||b||_L1): phi' lies in [1/C_0, C_0].
inline double removal_constant(double k_sigma, double l1_norm) {
  return std::exp(2.0 * k_sigma * k_sigma * l1_norm);
}

struct WorkingInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// x0 +- (||b||_inf T + 8 K_sigma sqrt(T)), widened to contain [-1, 1].
inline WorkingInterval default_working_interval(const SdeProblem& p) {
  const double w = p.drift.sup_bound * p.horizon + 8.0 * p.diffusion.k_sigma * std::sqrt(p.horizon);
  return {std::min(p.x0 - w, -1.0), std::max(p.x0 + w, 1.0)};
}

class TransformTables {
 public:
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& f_values() const noexcept { return f_; }
  const std::vector<double>& phi_values() const noexcept { return phi_.values(); }
  double c0() const noexcept { return c0_; }
  double quad_tol() const noexcept { return quad_tol_; }
  double x_lo() const noexcept { return grid_.front(); }
  double x_hi() const noexcept { return grid_.back(); }
  double z_lo() const noexcept { return phi_.values().front(); }
  double z_hi() const noexcept { return phi_.values().back(); }
  /// Largest per-cell quadrature error estimate seen while building.
  double max_quad_error() const noexcept { return max_quad_error_; }

  bool contains(double x) const noexcept { return x >= x_lo() && x <= x_hi(); }

  double phi(double x) const {
    check_range(x, "phi");
    return phi_(x);
  }

  double f(double x) const {
    check_range(x, "f");
    return f_interp(x);
  }

  double phi_prime(double x) const {
    check_range(x, "phi_prime");
    return std::exp(f_interp(x));
  }

  /// From the ODE phi'' = -2 b phi' / sigma^2, never by differencing.
  double phi_second(double x) const {
    const double s = diffusion_(x);
    return -2.0 * drift_(x) * phi_prime(x) / (s * s);
  }

  double phi_inverse(double z) const {
    if (!(z >= z_lo() && z <= z_hi()))
      throw std::out_of_range("phi_inverse: z=" + std::to_string(z) + " outside [" + std::to_string(z_lo()) + ", " +
                              std::to_string(z_hi()) + "]");
    const auto& values = phi_.values();
    const std::size_t i = locate_cell(values, z);
    double a = grid_[i], b = grid_[i + 1];
    const double target_tol = 0.5 * quad_tol_;
    // Safeguarded Newton on the monotone cubic.
    double x = a + (b - a) * (z - values[i]) / (values[i + 1] - values[i]);
    for (int iter = 0; iter < 200; ++iter) {
      const double r = phi_(x) - z;
      if (std::abs(r) <= target_tol) break;
      if (r > 0) b = x; else a = x;
      const double d = phi_.derivative(x);
      double next = d > 0 ? x - r / d : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (next == x || b - a <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
      x = next;
    }
    return x;
  }

  /// Clamps into the working interval; the caller counts the event.
  double clamp(double x) const noexcept { return std::clamp(x, x_lo(), x_hi()); }

  void write_csv(std::ostream& os) const {
    os << "x,f,phi,phi_prime\n";
    os.precision(17);
    for (std::size_t i = 0; i < grid_.size(); ++i)
      os << grid_[i] << ',' << f_[i] << ',' << phi_.values()[i] << ',' << std::exp(f_[i]) << '\n';
  }

  friend TransformTables build_transform(const SdeProblem&, double, double, double);

 private:
  void check_range(double x, const char* what) const {
    if (!contains(x))
      throw std::out_of_range(std::string(what) + ": x=" + std::to_string(x) + " outside [" + std::to_string(x_lo()) +
                              ", " + std::to_string(x_hi()) + "]");
  }

  // Cubic Hermite per cell with exact one-sided slopes -2 b / sigma^2.
  double f_interp(double x) const {
    const std::size_t i = locate_cell(grid_, x);
    const double h = grid_[i + 1] - grid_[i];
    const double t = (x - grid_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f_[i] + (t3 - 2 * t2 + t) * h * slope_right_[i] + (-2 * t3 + 3 * t2) * f_[i + 1] +
           (t3 - t2) * h * slope_left_[i + 1];
  }

  std::vector<double> grid_;
  std::vector<double> f_;
  std::vector<double> slope_right_;  // f'(x_i+)
  std::vector<double> slope_left_;   // f'(x_i-)
  MonotoneCubic phi_;
  double c0_ = 1.0;
  double quad_tol_ = kDefaultQuadTol;
  double max_quad_error_ = 0.0;
  DriftSpec drift_;
  DiffusionSpec diffusion_;
};

namespace detail {

inline std::vector<double> transform_nodes(double x_lo, double x_hi, const std::vector<double>& breakpoints) {
  constexpr double kSpacing = 1.0 / 128.0;
  constexpr int kRefine = 8;
  std::vector<double> nodes{x_lo, x_hi, 0.0};
  for (double k = std::ceil(x_lo / kSpacing); k * kSpacing < x_hi; k += 1.0) nodes.push_back(k * kSpacing);
  for (double bp : breakpoints) {
    if (!(bp > x_lo && bp < x_hi)) continue;
    nodes.push_back(bp);
    for (int j = 1; j <= 4 * kRefine; ++j) {
      const double d = j * kSpacing / kRefine;
      if (bp - d > x_lo) nodes.push_back(bp - d);
      if (bp + d < x_hi) nodes.push_back(bp + d);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  // Drop grid nodes that crowd a mandatory one (0, ends, breakpoints).
  auto mandatory = [&](double x) {
    return x == 0.0 || x == x_lo || x == x_hi || std::find(breakpoints.begin(), breakpoints.end(), x) != breakpoints.end();
  };
  std::vector<double> out;
  for (double x : nodes) {
    if (!out.empty() && x - out.back() < 1e-9) {
      if (mandatory(x) && !mandatory(out.back())) out.back() = x;
      continue;
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace detail

/// Tabulates f and phi on [x_lo, x_hi] (x_lo < 0 < x_hi). The drift must be
/// integrable; truncate it first otherwise.
inline TransformTables build_transform(const SdeProblem& problem, double x_lo, double x_hi,
                                       double quad_tol = kDefaultQuadTol) {
  if (!problem.drift.integrable())
    throw std::invalid_argument("build_transform: drift is not integrable; apply truncate_drift first");
  if (!(x_lo < 0.0 && 0.0 < x_hi)) throw std::invalid_argument("build_transform: need x_lo < 0 < x_hi");
  if (!(quad_tol > 0.0)) throw std::invalid_argument("build_transform: quad_tol must be positive");

  TransformTables t;
  t.drift_ = problem.drift;
  t.diffusion_ = problem.diffusion;
  t.quad_tol_ = quad_tol;
  t.c0_ = removal_constant(problem.diffusion.k_sigma, *problem.drift.l1_norm);
  t.grid_ = detail::transform_nodes(x_lo, x_hi, problem.drift.breakpoints);

  const auto& drift = t.drift_;
  const auto& sigma = t.diffusion_;
  auto integrand = [&](double y) {
    const double s = sigma(y);
    return -2.0 * drift(y) / (s * s);
  };

  const std::vector<double>& g = t.grid_;
  const std::size_t n = g.size();
  const std::size_t zero = static_cast<std::size_t>(std::find(g.begin(), g.end(), 0.0) - g.begin());
  t.f_.assign(n, 0.0);
  t.slope_right_.resize(n);
  t.slope_left_.resize(n);
  std::vector<double> phi(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    t.slope_right_[i] = i + 1 < n ? integrand(std::nextafter(g[i], g[i + 1])) : integrand(g[i]);
    t.slope_left_[i] = i > 0 ? integrand(std::nextafter(g[i], g[i - 1])) : integrand(g[i]);
  }

  // Integral of exp(f) over a cell whose left value f(a) is known; f inside
  // the cell comes from an inner quadrature anchored at a.
  auto cell = [&](double a, double b, double fa) {
    const auto df = adaptive_simpson(integrand, a, b, quad_tol, true);
    auto expf = [&](double y) {
      if (y == a) return std::exp(fa);
      return std::exp(fa + adaptive_simpson(integrand, a, y, quad_tol, true).value);
    };
    const auto dphi = adaptive_simpson(expf, a, b, quad_tol, true);
    t.max_quad_error_ = std::max({t.max_quad_error_, df.error, dphi.error});
    return std::pair{df.value, dphi.value};
  };

  for (std::size_t i = zero; i + 1 < n; ++i) {
    const auto [df, dphi] = cell(g[i], g[i + 1], t.f_[i]);
    t.f_[i + 1] = t.f_[i] + df;
    phi[i + 1] = phi[i] + dphi;
  }
  for (std::size_t i = zero; i > 0; --i) {
    // Integrate right-to-left so the anchor is the known node.
    const auto [df, dphi] = cell(g[i], g[i - 1], t.f_[i]);
    t.f_[i - 1] = t.f_[i] + df;
    phi[i - 1] = phi[i] + dphi;
  }

  std::vector<double> slopes(n);
  for (std::size_t i = 0; i < n; ++i) slopes[i] = std::exp(t.f_[i]);
  t.phi_ = MonotoneCubic(g, std::move(phi), std::move(slopes));
  return t;
}

inline TransformTables build_transform(const SdeProblem& problem, double quad_tol = kDefaultQuadTol) {
  const auto w = default_working_interval(problem);
  return build_transform(problem, w.lo, w.hi, quad_tol);
}

/// Worst slack of 1/C_0 <= (phi_{i+1} - phi_i) / (x_{i+1} - x_i) <= C_0 over
/// the grid (negative means violated).
inline double discrete_slope_slack(const TransformTables& t) {
  double worst = std::numeric_limits<double>::infinity();
  const auto& g = t.grid();
  const auto& phi = t.phi_values();
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double slope = (phi[i + 1] - phi[i]) / (g[i + 1] - g[i]);
    worst = std::min({worst, slope - 1.0 / t.c0(), t.c0() - slope});
  }
  return worst;
}

}  // namespace irrsde
