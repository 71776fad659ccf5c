#include "richkde/rng.hpp"

#include <cmath>
#include <numbers>

namespace richkde {

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t k) {
  return mix64(seed ^ (0x9E3779B97F4A7C15ULL * k));
}

double NormalStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 mapped to (0, 1] so the log never sees 0.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace richkde
