#pragma once

// Counter-based random streams.
//
// Every path gets its own Philox4x32-10 stream keyed by the experiment seed;
// the counter carries (block, domain, stream). Two streams never share a
// counter value, so results do not depend on which worker generates which
// path.

#include <array>
#include <cstdint>

#include <boost/random/normal_distribution.hpp>

namespace irrsde {

struct Philox4x32 {
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static constexpr counter_type apply(counter_type ctr, key_type key) noexcept {
    for (int r = 0; r < kRounds; ++r) {
      if (r > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// Independent sub-streams of one path.
enum class StreamDomain : std::uint32_t {
  brownian = 0,
  auxiliary = 1,
  sampling = 2,
};

/// 64-bit UniformRandomBitGenerator over one Philox stream.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  PhiloxStream(std::uint64_t seed, std::uint64_t stream,
               StreamDomain domain = StreamDomain::brownian) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0u, static_cast<std::uint32_t>(domain), static_cast<std::uint32_t>(stream),
             static_cast<std::uint32_t>(stream >> 32)} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    if (cursor_ == 2) refill();
    return buffer_[cursor_++];
  }

  std::uint64_t blocks_consumed() const noexcept { return blocks_; }

 private:
  void refill() noexcept {
    const auto out = Philox4x32::apply(ctr_, key_);
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    cursor_ = 0;
    ++blocks_;
    // 2^32 blocks per stream is far beyond any path length used here.
    ++ctr_[0];
  }

  Philox4x32::key_type key_;
  Philox4x32::counter_type ctr_;
  std::array<std::uint64_t, 2> buffer_{};
  int cursor_ = 2;
  std::uint64_t blocks_ = 0;
};

/// Uniform on [0, 1) with 53 random bits.
inline double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Standard normal variates (ziggurat) drawn from a Philox stream.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream,
               StreamDomain domain = StreamDomain::brownian) noexcept
      : engine_(seed, stream, domain) {}

  double operator()() { return dist_(engine_); }
  double uniform() noexcept { return to_unit_interval(engine_()); }

  PhiloxStream& engine() noexcept { return engine_; }

 private:
  PhiloxStream engine_;
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace irrsde
