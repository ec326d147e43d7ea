#pragma once

#include <cmath>
#include <cstdint>

namespace chaoslab {

// Counter-based generator: word(stream, counter) is a pure function of
// (seed, stream, counter), so parallel consumers can sample any position
// independently and reproducibly. SplitMix64 finalizer underneath.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(mix(seed ^ 0x6A09E667F3BCC909ULL)) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t word(std::uint64_t stream, std::uint64_t counter) const {
    return mix(mix(seed_ ^ (0xD1B54A32D192ED03ULL * (stream + 1))) + counter);
  }

  double uniform01(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(word(stream, counter) >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on two counter positions.
  double normal(std::uint64_t stream, std::uint64_t counter) const {
    double u1 = uniform01(stream, 2 * counter);
    double u2 = uniform01(stream, 2 * counter + 1);
    if (u1 <= 0x1.0p-60) u1 = 0x1.0p-60;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  int sign_bit(std::uint64_t stream, std::uint64_t counter) const {
    return (word(stream, counter) & 1u) ? -1 : +1;
  }

 private:
  std::uint64_t seed_;
};

// Sub-seed derivation for independent trials/restarts.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return CounterRng::mix(CounterRng::mix(seed) + index);
}

}  // namespace chaoslab
