#pragma once

// Deterministic random number generation. The generator (PCG32), the mapping
// to doubles, and the normal transform are all spelled out here because the
// standard library's distributions are implementation-defined: the same seed
// must reproduce the same trajectory bytes on every rebuild.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace condlab {

// FNV-1a, used to turn role names into stream tags and to digest file bytes.
constexpr std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives an independent stream id from a base seed, a role tag, and up to two
// salts (typically problem sizes). Distinct roles never share a stream, so
// e.g. parameter draws do not move when the dataset size changes.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag,
                                      std::uint64_t salt0 = 0,
                                      std::uint64_t salt1 = 0) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ tag);
  h = splitmix64(h ^ salt0);
  h = splitmix64(h ^ salt1);
  return h;
}

inline constexpr std::uint64_t kStreamParams = fnv1a("params");
inline constexpr std::uint64_t kStreamDataset = fnv1a("dataset");
inline constexpr std::uint64_t kStreamKernel = fnv1a("kernel");

// PCG32 (oneseq variant): 64-bit LCG state, xorshift-rotate output.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed) : state_(0) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() noexcept {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ull + 1442695040888963407ull;
    const auto xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_double();
  }

  // Standard normal via Box-Muller; the second deviate of each pair is cached
  // so consecutive calls consume the stream at a fixed, reproducible rate.
  double next_normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace condlab
