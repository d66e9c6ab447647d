#pragma once

#include <cstdint>

namespace kelly {

/// Counter-based random stream. Every draw is a pure function of
/// (seed, stream, counter), so results do not depend on evaluation order
/// or on how work is split across threads.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  /// 64 random bits for position `counter` of this stream.
  [[nodiscard]] constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  [[nodiscard]] constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

}  // namespace kelly
