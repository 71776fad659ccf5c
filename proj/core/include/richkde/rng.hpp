#pragma once

#include <cstdint>
#include <random>

namespace richkde {

// Stream-seed derivation pinned for cross-platform reproducibility:
// splitmix64 finalizer applied to seed XOR golden-ratio-constant * k.
std::uint64_t mix64(std::uint64_t z);
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t k);

// Standard-normal deviates from a pinned generator and transform:
// mt19937_64 seeded directly, uniforms from the top 53 bits, and the
// trigonometric Box-Muller pair. The spare deviate is cached; callers
// sampling row-structured data clear it at each row boundary so the
// stream position depends only on (seed, row count, row width).
class NormalStream {
public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  // [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double next_normal();
  void reset_spare() { has_spare_ = false; }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace richkde
