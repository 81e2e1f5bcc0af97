#pragma once

#include <cstdint>
#include <random>

namespace mpb {

// Seedable 64-bit Mersenne Twister with hand-rolled uniform and normal
// transforms, so sampled values do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Standard normal by Box-Muller; consumes two uniforms per variate.
  double normal();

 private:
  std::mt19937_64 eng_;
};

}  // namespace mpb
