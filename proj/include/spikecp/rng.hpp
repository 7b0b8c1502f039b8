// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace spikecp {

// Seeded generator with an explicit uint->[0,1) mapping. std::uniform_real_distribution
// is implementation-defined, which would break bit-reproducibility across toolchains.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(static_cast<std::uint32_t>(seed ^ (seed >> 32))) {}

  // Uniform in [0, 1) with 24 bits of mantissa; exact in float.
  float uniform01() {
    return static_cast<float>(engine_() >> 8) * (1.0f / 16777216.0f);
  }

  float uniform(float lo, float hi) { return lo + uniform01() * (hi - lo); }

  std::uint32_t next_u32() { return engine_(); }

 private:
  std::mt19937 engine_;
};

// Stream splitter so tasks, targets, and weights draw from unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace spikecp
