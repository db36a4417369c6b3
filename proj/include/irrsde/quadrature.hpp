#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace irrsde {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

namespace detail {

template <class F>
QuadratureResult simpson_recurse(const F& f, double a, double b, double fa, double fm, double fb,
                                 double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
    return {left + right + diff / 15.0, std::abs(diff) / 15.0};
  }
  const auto l = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
  const auto r = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.error + r.error};
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction on [a, b]. The integrand is
/// assumed smooth on the open interval; jumps must be split out by the caller
/// (see integrate_piecewise).
/// With `one_sided` set, the endpoint samples are taken one ulp inside the
/// interval so a jump sitting exactly on an endpoint contributes its inner limit.
template <class F>
QuadratureResult adaptive_simpson(const F& f, double a, double b, double tol, bool one_sided = false,
                                  int max_depth = 48) {
  if (a == b) return {};
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_simpson: tolerance must be positive");
  const double fa = f(one_sided ? std::nextafter(a, b) : a);
  const double fb = f(one_sided ? std::nextafter(b, a) : b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Integrates over [a, b] splitting at every breakpoint strictly inside it.
/// Each smooth piece gets the full tolerance.
template <class F>
QuadratureResult integrate_piecewise(const F& f, double a, double b, std::span<const double> breakpoints,
                                     double tol) {
  const double sign = a <= b ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  std::vector<double> cuts{lo};
  for (double x : breakpoints)
    if (x > lo && x < hi) cuts.push_back(x);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const auto piece = adaptive_simpson(f, cuts[i], cuts[i + 1], tol, true);
    total.value += piece.value;
    total.error += piece.error;
  }
  total.value *= sign;
  return total;
}

}  // namespace irrsde
