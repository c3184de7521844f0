#pragma once

#include <cstdint>

namespace concord {

// SplitMix64 (Steele, Lea & Flood; Vigna's fixed-increment variant).
// Chosen over <random> engines because the exact output sequence is part
// of the reproducibility contract and must be identical across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

namespace detail {

inline std::uint64_t mix_bits(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Addressable random stream: a (base_seed, stream_index) pair names one
/// deterministic sequence of draws. Replicate h of a simulation cell uses
/// stream_index = h, so results do not depend on which thread runs it.
struct SampleStream {
  std::uint64_t base_seed = 0;
  std::uint64_t stream_index = 0;

  /// Deterministic 64-bit state derived from the pair. Distinct pairs map
  /// to distinct, well-separated states.
  std::uint64_t mixed_state() const {
    return detail::mix_bits(base_seed + 0x9E3779B97F4A7C15ull) ^
           detail::mix_bits(stream_index + 0x3C6EF372FE94F82Bull);
  }

  SplitMix64 generator() const { return SplitMix64(mixed_state()); }

  /// Child stream family rooted at this stream (used for per-cell seeds).
  SampleStream substream(std::uint64_t child) const {
    return SampleStream{mixed_state(), child};
  }
};

}  // namespace concord
