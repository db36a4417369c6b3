#pragma once

// Nested dyadic Brownian increments.
//
// Coarse increments are formed by a fixed pairwise tree: each coarse
// increment is (left child) + (right child), recursively. Coarsening
// n_fine -> n' -> n therefore gives bit-identical results to n_fine -> n,
// and the streaming accumulator below reproduces the same sums.

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrsde/rng.hpp"

namespace irrsde {

/// d with n_fine = n * 2^d; throws unless n divides n_fine with a power-of-two ratio.
inline int dyadic_depth(std::size_t n_fine, std::size_t n) {
  if (n == 0 || n_fine == 0) throw std::invalid_argument("step counts must be positive");
  if (n_fine % n != 0)
    throw std::invalid_argument("n=" + std::to_string(n) + " does not divide n_fine=" + std::to_string(n_fine));
  const std::size_t ratio = n_fine / n;
  if (!std::has_single_bit(ratio))
    throw std::invalid_argument("n_fine/n=" + std::to_string(ratio) + " is not a power of two");
  return std::countr_zero(ratio);
}

/// One halving step of the pairwise tree.
inline std::vector<double> pairwise_halve(const std::vector<double>& fine) {
  std::vector<double> out(fine.size() / 2);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fine[2 * k] + fine[2 * k + 1];
  return out;
}

struct SeedInfo {
  std::string generator = "philox4x32-10+ziggurat";
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct BrownianGrid {
  double t_horizon = 1.0;
  std::size_t n_fine = 0;
  std::vector<double> increments;  // N(0, T/n_fine)
  SeedInfo seed_info;

  /// Increments of the n-step grid.
  std::vector<double> coarsen(std::size_t n) const {
    const int depth = dyadic_depth(n_fine, n);
    std::vector<double> out = increments;
    for (int d = 0; d < depth; ++d) out = pairwise_halve(out);
    return out;
  }

  double terminal_value() const {
    double w = 0.0;
    for (double dw : increments) w += dw;
    return w;
  }
};

/// Increment k of a path is sqrt(T/n_fine) * Z_k, Z_k the k-th normal of the
/// (seed, stream) Brownian stream. The streaming simulators use the same rule.
inline BrownianGrid sample_grid(double horizon, std::size_t n_fine, std::uint64_t seed, std::uint64_t stream) {
  if (!(horizon > 0.0)) throw std::invalid_argument("sample_grid: horizon must be positive");
  if (n_fine == 0) throw std::invalid_argument("sample_grid: n_fine must be positive");
  BrownianGrid g;
  g.t_horizon = horizon;
  g.n_fine = n_fine;
  g.seed_info.seed = seed;
  g.seed_info.stream = stream;
  g.increments.resize(n_fine);
  NormalStream normals(seed, stream, StreamDomain::brownian);
  const double scale = std::sqrt(horizon / static_cast<double>(n_fine));
  for (auto& dw : g.increments) dw = scale * normals();
  return g;
}

/// Streaming form of the pairwise tree: push fine increments left to right;
/// `on_block(depth, value)` fires whenever a block of 2^depth fine
/// increments completes (depth >= 1).
class DyadicAccumulator {
 public:
  explicit DyadicAccumulator(int max_depth) : pending_(max_depth), has_(max_depth, false) {}

  template <class OnBlock>
  void push(double dw, OnBlock&& on_block) {
    double carry = dw;
    for (std::size_t d = 0; d < pending_.size(); ++d) {
      if (!has_[d]) {
        pending_[d] = carry;
        has_[d] = true;
        return;
      }
      carry = pending_[d] + carry;
      has_[d] = false;
      on_block(static_cast<int>(d) + 1, carry);
    }
  }

 private:
  std::vector<double> pending_;
  std::vector<bool> has_;
};

}  // namespace irrsde
