#include "depthkit/random.h"

#include <limits>
#include <stdexcept>

namespace depthkit {

std::uint64_t Rng::UniformIndex(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::UniformIndex: empty range");
  // Rejection sampling on the largest multiple of n below 2^64.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::int64_t Rng::UniformInt(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::UniformInt: empty range");
  if (hi == lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == std::numeric_limits<std::uint64_t>::max()) {
    return static_cast<std::int64_t>(engine_());
  }
  return lo + static_cast<std::int64_t>(UniformIndex(span + 1));
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Seed Hash64(Seed seed, std::string_view id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : id) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return Seed{SplitMix64(SplitMix64(seed.value) ^ h)};
}

}  // namespace depthkit
