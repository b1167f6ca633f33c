#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace exitlab {

/// SplitMix64 (Steele/Lea/Flood splittable generator, Vigna's fixed-increment
/// variant).  64-bit state, passes BigCrush, and cheap enough for the event
/// loop.  Streams are derived by hashing (master_seed, tags...), so any
/// (experiment, path) pair owns an independent stream regardless of how the
/// work is scheduled across threads.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform on (0,1); never returns an exact endpoint.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  /// Exp(1) waiting time.
  double next_exp() { return -std::log(next_unit()); }

  /// Standard normal via Box-Muller.  Unbuffered: always consumes exactly two
  /// uniforms, which keeps draw counts predictable for stream coupling.
  double next_normal() {
    const double u = next_unit();
    const double v = next_unit();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// One avalanche step; used to fold stream tags into a seed.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag + 0x632BE59BD9B4E019ull));
}

/// Deterministic stream derivation: same (master_seed, tags) always yields the
/// same stream, independent of execution order.
inline SplitMix64 make_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = master_seed;
  for (std::uint64_t t : tags) s = mix_seed(s, t);
  return SplitMix64(s);
}

}  // namespace exitlab
