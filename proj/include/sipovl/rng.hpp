#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sipovl {

// Fixed offsets added to the base seed, one per stochastic source, so that
// reseeding or re-drawing one source never perturbs another.
enum class RngStream : std::uint64_t {
  kArrivals = 1,
  kHoldTimes = 2,
  kLinkLossBase = 16,  // + link index
};

inline std::uint64_t stream_seed(std::uint64_t base_seed, RngStream stream, std::uint64_t index = 0) {
  return base_seed + static_cast<std::uint64_t>(stream) + index;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of precision. Computed by hand rather than
  // with std::uniform_real_distribution so draws are identical across
  // standard library implementations.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sipovl
