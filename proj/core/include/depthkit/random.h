#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace depthkit {

struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

// Deterministic generator used by every stochastic operation.
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions do not, so the bounded-integer and real draws are implemented
// here to keep results bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t UniformIndex(std::uint64_t n);

  // Uniform integer in [lo, hi]. Consumes no randomness when lo == hi.
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi); exactly lo when lo == hi.
  double UniformReal(double lo, double hi) {
    return lo == hi ? lo : lo + (hi - lo) * Uniform01();
  }

  // Child seed for an independent sub-stream.
  Seed Fork() { return Seed{engine_()}; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t SplitMix64(std::uint64_t x);

// Per-item seed derived from a run seed and an item id (FNV-1a of the id
// mixed with the seed through SplitMix64).
Seed Hash64(Seed seed, std::string_view id);

}  // namespace depthkit
