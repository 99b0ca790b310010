#pragma once

#include <array>
#include <cstdint>

namespace shapeak {

// Counter-based generator (Philox4x32-10). A stream is identified by
// (seed, stream); draws are a pure function of the counter, so instances
// regenerate bit-identically from (parameters, seed) alone and independent
// substreams can be handed to each matrix/vector of an instance.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double uniform();
  // Uniform on [lo,hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0,n).
  std::uint64_t uniform_index(std::uint64_t n);
  // Standard normal via Box-Muller (deterministic draw order).
  double normal();

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t counter) const;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace shapeak
