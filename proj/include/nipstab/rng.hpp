#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <random>

namespace nipstab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a;
  std::uint64_t h = splitmix64(s);
  s ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return splitmix64(s);
}

/// FNV-1a over the bit pattern of a double; used to derive deterministic
/// per-point randomness from vector coordinates.
inline std::uint64_t fnv1a64(std::uint64_t h, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffULL;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t fnv_offset_basis = 0xcbf29ce484222325ULL;

/// Seeded generator with uniform helpers. Doubles are produced from raw
/// 64-bit draws so the stream does not depend on the standard library's
/// distribution implementations.
class rng {
public:
  explicit rng(std::uint64_t seed) : gen_(seed) {}

  /// Independent stream for sample `index` of logical stream `stream`
  /// under `seed`; schedule-independent by construction.
  static rng for_sample(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t index) {
    return rng(hash_combine(hash_combine(seed, stream), index));
  }

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t bits() { return gen_(); }

  /// Uniform scalar on the unit circle.
  std::complex<double> unit_scalar() {
    double t = uniform(0.0, 6.283185307179586476925286766559);
    return {std::cos(t), std::sin(t)};
  }

  /// Uniform on the closed complex disc of the given radius.
  std::complex<double> disc(double radius) {
    double r = radius * std::sqrt(uniform01());
    return r * unit_scalar();
  }

private:
  std::mt19937_64 gen_;
};

} // namespace nipstab
