#pragma once

#include <cstdint>

namespace prefgame {

// xoshiro256++ (Blackman & Vigna, 2019), state seeded with SplitMix64 over
// (seed XOR splitmix64(stream)). Fixed published constants, no
// platform-dependent behaviour: identical (seed, stream) gives identical
// sequences everywhere. The generator name is echoed into run configs.
class RngState {
 public:
  static constexpr const char* kGeneratorName = "xoshiro256++/splitmix64";

  explicit RngState(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double next_double();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t s_[4];
};

}  // namespace prefgame
