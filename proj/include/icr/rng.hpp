#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace icr {

// 64-bit finalizer from SplitMix64 (Steele, Lea & Flood; public domain).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// SplitMix64 generator. Counter-based, so identical seeds produce identical
// streams on every platform; this is the only randomness source in the
// toolkit. State advances by the golden-gamma constant per draw.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform in [0, n) by rejection sampling; unbiased and portable. n >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// FNV-1a over bytes; used for sub-seed derivation and manifest hashes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Per-(route, family) sub-seed: mix64(s ^ fnv1a64(route_id ++ 0x1F ++ family)).
// Generation for one route depends only on (s, route_id, family), never on
// processing order or worker count.
inline std::uint64_t derive_sub_seed(std::uint64_t seed, std::string_view route_id,
                                     char family) {
  std::string key;
  key.reserve(route_id.size() + 2);
  key.append(route_id);
  key.push_back('\x1f');
  key.push_back(family);
  return mix64(seed ^ fnv1a64(key));
}

}  // namespace icr
