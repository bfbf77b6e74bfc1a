#pragma once

// Deterministic random streams for the Monte-Carlo harness.
//
// Streams are keyed, not shared: every replication derives its own 64-bit
// seed from (base_seed, coordinates...) through the SplitMix64 finaliser,
// so results do not depend on execution order or thread count.
//
// Generator: xoshiro256** (Blackman & Vigna), state seeded by SplitMix64.
// Normals: inverse CDF (Wichura's AS 241, PPND16, relative accuracy ~1e-16)
// applied to uniforms on the open interval (0, 1); one uniform per normal.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace spikecount {

/// SplitMix64 output function (the "mix64" finaliser).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds coordinates into a seed: h <- mix64(h + golden * (i+1) ^ v).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(base);
  std::uint64_t i = 0;
  for (std::uint64_t v : coords) h = mix64((h + 0x9e3779b97f4a7c15ULL * ++i) ^ v);
  return h;
}

class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256ss(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform_open();
  /// Standard normal by inversion.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Standard normal quantile Phi^{-1}(p) for p in (0, 1) (AS 241).
double normal_quantile(double p);

}  // namespace spikecount
