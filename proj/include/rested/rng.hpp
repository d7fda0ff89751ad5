#pragma once

#include <cstdint>

// Counter-based splittable RNG. Every draw is a pure function of a 64-bit
// key, so sub-streams can be derived per (base_seed, run_id, arm, pull) and
// consumed in any interleaving without perturbing each other.
namespace rested::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

// Order-sensitive key derivation: combine(a, b) != combine(b, a).
constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t salt) {
  return mix64(key ^ (mix64(salt + kGolden) + kGolden));
}

// Small generator seeded from a derived key; splitmix64 sequence.
class Stream {
 public:
  explicit constexpr Stream(std::uint64_t key) : state_(key) {}

  constexpr std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in (0, 1]; safe as a log() argument
  double next_open0() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace rested::rng
