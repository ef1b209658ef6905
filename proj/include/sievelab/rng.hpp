#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace sievelab {

// Derives an independent stream seed from a master seed and a replicate
// index: SplitMix64 finalizer over master XOR index*odd-constant. The map is
// injective in the index for a fixed master (odd multiplier, bijective mix).
constexpr std::uint64_t seed_derive(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master ^ (0x9E3779B97F4A7C15ull * (index + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// xoshiro256++ with SplitMix64 state expansion. One stream is owned by
// exactly one worker; streams are never shared or split mid-run.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) {
      sm += 0x9E3779B97F4A7C15ull;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      w = z ^ (z >> 31);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
      state_[0] = 0x9E3779B97F4A7C15ull;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Strictly inside (0,1): ((r >> 11) + 0.5) * 2^-53, so -log stays finite.
  double next_uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  void fill_uniform01(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = next_uniform01();
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

}  // namespace sievelab
