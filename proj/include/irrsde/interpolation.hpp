#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace irrsde {

/// Index i with grid[i] <= x <= grid[i+1]; grid strictly increasing, x in range.
inline std::size_t locate_cell(const std::vector<double>& grid, double x) {
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  if (it == grid.begin()) return 0;
  const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
  return std::min(i, grid.size() - 2);
}

inline double linear_interpolate(const std::vector<double>& grid, const std::vector<double>& values, double x) {
  const std::size_t i = locate_cell(grid, x);
  const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
  return values[i] + t * (values[i + 1] - values[i]);
}

/// Piecewise-cubic Hermite interpolant that is monotone whenever the data
/// are. Node slopes come from the caller (exact derivatives when available)
/// and are limited with the Fritsch-Carlson condition alpha^2 + beta^2 <= 9.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes)
      : x_(std::move(x)), y_(std::move(y)), m_(std::move(slopes)) {
    if (x_.size() < 2 || y_.size() != x_.size() || m_.size() != x_.size())
      throw std::invalid_argument("MonotoneCubic: need >= 2 nodes and matching sizes");
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
      if (!(x_[i + 1] > x_[i])) throw std::invalid_argument("MonotoneCubic: abscissae must increase");
    limit_slopes();
  }

  double operator()(double x) const {
    const std::size_t i = locate_cell(x_, x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    // Written around y_i so a flat cell reproduces its value exactly.
    return y_[i] + h01 * (y_[i + 1] - y_[i]) + h * (h10 * m_[i] + h11 * m_[i + 1]);
  }

  double derivative(double x) const {
    const std::size_t i = locate_cell(x_, x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    return (6 * t2 - 6 * t) / h * y_[i] + (3 * t2 - 4 * t + 1) * m_[i] + (-6 * t2 + 6 * t) / h * y_[i + 1] +
           (3 * t2 - 2 * t) * m_[i + 1];
  }

  const std::vector<double>& nodes() const noexcept { return x_; }
  const std::vector<double>& values() const noexcept { return y_; }
  double front() const noexcept { return x_.front(); }
  double back() const noexcept { return x_.back(); }
  std::size_t limited_count() const noexcept { return limited_; }

 private:
  void limit_slopes() {
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const double delta = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
      if (delta == 0.0) {
        if (m_[i] != 0.0 || m_[i + 1] != 0.0) ++limited_;
        m_[i] = m_[i + 1] = 0.0;
        continue;
      }
      if (m_[i] * delta < 0.0) {
        m_[i] = 0.0;
        ++limited_;
      }
      if (m_[i + 1] * delta < 0.0) {
        m_[i + 1] = 0.0;
        ++limited_;
      }
      const double a = m_[i] / delta;
      const double b = m_[i + 1] / delta;
      const double r2 = a * a + b * b;
      if (r2 > 9.0) {
        const double tau = 3.0 / std::sqrt(r2);
        m_[i] = tau * a * delta;
        m_[i + 1] = tau * b * delta;
        ++limited_;
      }
    }
  }

  std::vector<double> x_, y_, m_;
  std::size_t limited_ = 0;
};

}  // namespace irrsde
