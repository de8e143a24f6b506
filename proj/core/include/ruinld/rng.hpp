#pragma once

#include <cmath>
#include <cstdint>

namespace ruinld {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Substream ids; every random quantity of a path draws from its own
/// counter-based stream, so runs can share randomness selectively (e.g.
/// finite-time and random-time estimates reuse claim/arrival draws).
enum class Substream : std::uint64_t {
  Claims = 1,
  Arrivals = 2,
  RandomTime = 3,
  StratifiedClaims = 4,
  StratifiedTail = 5,
};

/// Inverse of the standard normal CDF (Wichura's PPND16).
/// Accurate to ~1e-16 for p in (0,1); p outside (0,1) returns +/-inf.
double normal_icdf(double p) noexcept;

/// Upper tail Phi_bar(x) = P(Z > x) of the standard normal.
inline double normal_tail(double x) noexcept {
  return 0.5 * std::erfc(x * 0.70710678118654752440);
}

/// Counter-based random stream. A stream is a pure function of its key and
/// counter, so any (seed, path, substream, chunk) tuple can be replayed
/// independently of how many workers consume paths and in what order.
class RngStream {
 public:
  RngStream() = default;

  /// Derives an independent stream keyed by up to three 64-bit coordinates.
  /// The key chain mixes between coordinates, so (a,b)=(1,0) and (0,1)
  /// produce unrelated streams.
  static RngStream derive(std::uint64_t seed, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
    std::uint64_t k = detail::mix64(seed ^ 0x5851F42D4C957F2Dull);
    k = detail::mix64(k + a);
    k = detail::mix64(k + b);
    k = detail::mix64(k + c);
    RngStream s;
    s.key_ = k;
    return s;
  }

  std::uint64_t next_u64() noexcept {
    return detail::mix64(key_ + (++counter_) * detail::kGolden);
  }

  /// Uniform on the open interval (0,1); never returns 0 or 1, so quantile
  /// transforms stay finite.
  double uniform01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept { return normal_icdf(uniform01()); }

  double exponential(double mean = 1.0) noexcept {
    return -mean * std::log(uniform01());
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace ruinld
