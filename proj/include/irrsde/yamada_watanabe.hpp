#pragma once

// Yamada-Watanabe approximations of |x|.
//
// psi is supported on [eps/delta, eps], integrates to 1 and is dominated by
// 2 / (z log delta). With u = log(z delta / eps) / log(delta) in [0, 1]:
//
//   psi(z) = 2 / (z log delta) * sin^2(pi u)
//   Psi(y) = int_0^y psi = u - sin(2 pi u) / (2 pi)
//   phi(x) = int_0^|x| Psi
//
// phi is even and C^2 with phi'(x) = sign(x) Psi(|x|), phi''(x) = psi(|x|).

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "irrsde/interpolation.hpp"

namespace irrsde {

struct YwParams {
  double delta = 2.0;
  double epsilon = 0.5;

  double lower() const noexcept { return epsilon / delta; }
};

inline YwParams make_yw_params(double delta, double epsilon) {
  if (!(delta > 1.0)) throw std::invalid_argument("YwParams: delta must exceed 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("YwParams: epsilon must lie in (0, 1)");
  return {delta, epsilon};
}

inline double psi(const YwParams& p, double z) {
  if (!(z >= p.lower() && z <= p.epsilon)) return 0.0;
  const double log_delta = std::log(p.delta);
  const double u = std::log(z * p.delta / p.epsilon) / log_delta;
  const double s = std::sin(std::numbers::pi * u);
  return 2.0 / (z * log_delta) * s * s;
}

/// Dominating envelope 2 / (z log delta).
inline double psi_envelope(const YwParams& p, double z) { return 2.0 / (z * std::log(p.delta)); }

/// Psi(y) = int_0^y psi, for y >= 0.
inline double psi_antiderivative(const YwParams& p, double y) {
  if (y <= p.lower()) return 0.0;
  if (y >= p.epsilon) return 1.0;
  const double u = std::log(y * p.delta / p.epsilon) / std::log(p.delta);
  return u - std::sin(2.0 * std::numbers::pi * u) / (2.0 * std::numbers::pi);
}

/// phi_{delta,eps} with its outer integral tabulated on a log-spaced grid.
class YamadaWatanabe {
 public:
  static constexpr std::size_t kNodes = 4096;

  explicit YamadaWatanabe(YwParams p) : p_(make_yw_params(p.delta, p.epsilon)) {
    nodes_.resize(kNodes);
    outer_.resize(kNodes);
    const double log_lo = std::log(p_.lower());
    const double log_hi = std::log(p_.epsilon);
    for (std::size_t i = 0; i < kNodes; ++i)
      nodes_[i] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / (kNodes - 1));
    nodes_.front() = p_.lower();
    nodes_.back() = p_.epsilon;
    outer_[0] = 0.0;
    for (std::size_t i = 0; i + 1 < kNodes; ++i) outer_[i + 1] = outer_[i] + integrate_cell(nodes_[i], nodes_[i + 1]);
  }

  const YwParams& params() const noexcept { return p_; }

  double psi(double z) const { return irrsde::psi(p_, z); }

  double phi(double x) const {
    const double a = std::abs(x);
    if (a <= p_.lower()) return 0.0;
    if (a >= p_.epsilon) return outer_.back() + (a - p_.epsilon);
    const std::size_t i = locate_cell(nodes_, a);
    return outer_[i] + integrate_cell(nodes_[i], a);
  }

  double phi_prime(double x) const {
    const double v = psi_antiderivative(p_, std::abs(x));
    return x < 0.0 ? -v : v;
  }

  double phi_second(double x) const { return irrsde::psi(p_, std::abs(x)); }

  void write_csv(std::ostream& os, double x_max, std::size_t points) const {
    os << "x,phi,phi_prime,phi_second\n";
    os.precision(17);
    for (std::size_t i = 0; i < points; ++i) {
      const double x = -x_max + 2.0 * x_max * static_cast<double>(i) / static_cast<double>(points - 1);
      os << x << ',' << phi(x) << ',' << phi_prime(x) << ',' << phi_second(x) << '\n';
    }
  }

 private:
  // 8-point Gauss-Legendre on [a, b]; Psi is smooth inside the band.
  double integrate_cell(double a, double b) const {
    static constexpr std::array<double, 4> xs{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                              0.9602898564975363};
    static constexpr std::array<double, 4> ws{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                              0.1012285362903763};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
      s += ws[k] * (psi_antiderivative(p_, c - h * xs[k]) + psi_antiderivative(p_, c + h * xs[k]));
    return s * h;
  }

  YwParams p_;
  std::vector<double> nodes_;
  std::vector<double> outer_;
};

inline double yw_phi(const YamadaWatanabe& yw, double x) { return yw.phi(x); }
inline double yw_phi_prime(const YamadaWatanabe& yw, double x) { return yw.phi_prime(x); }
inline double yw_phi_second(const YamadaWatanabe& yw, double x) { return yw.phi_second(x); }

/// (delta, eps) = (2, n^{-1/2}) when alpha > 0, (n^{1/3}, 1 / log n) when alpha = 0.
inline YwParams schedule(double alpha, long long n) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw std::invalid_argument("schedule: alpha must lie in [0, 1/2]");
  if (n < 3) throw std::invalid_argument("schedule: n must be >= 3");
  const double nd = static_cast<double>(n);
  if (alpha > 0.0) return make_yw_params(2.0, 1.0 / std::sqrt(nd));
  return make_yw_params(std::cbrt(nd), 1.0 / std::log(nd));
}

}  // namespace irrsde
