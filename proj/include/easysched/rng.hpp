#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace easysched {

// All stochastic code draws from this wrapper instead of the std
// distributions, whose output is implementation-defined. mt19937_64 plus
// the helpers below produce the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Inclusive [lo, hi], unbiased via rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  // [0, 1) with 53 random bits.
  double uniform_real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_real();
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 step, used to derive independent per-agent seeds from a run
// seed and a stable tag.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = mix_seed(base);
  for (unsigned char c : tag) h = mix_seed(h ^ c);
  return h;
}

}  // namespace easysched
