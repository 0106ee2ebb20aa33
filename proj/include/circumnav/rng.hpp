#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace circumnav {

// splitmix64 step, used to mix seeds when deriving per-trial / per-episode
// streams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seedable pseudorandom stream. The generator is a Mersenne Twister
// (std::mt19937_64); uniform and normal draws are produced by fixed,
// implementation-independent recipes so that a (seed, call sequence)
// pair yields bit-identical values everywhere:
//   uniform01: top 53 bits of one engine output, scaled to [0, 1)
//   normal:    Box-Muller on two uniform draws (always consumes two)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Child stream for (index...) under this master seed. Derivation is pure:
  // it does not advance or depend on this stream's state.
  template <typename... Ix>
  static std::uint64_t derive(std::uint64_t master, Ix... index) {
    std::uint64_t h = splitmix64(master);
    ((h = splitmix64(h ^ static_cast<std::uint64_t>(index))), ...);
    return h;
  }

  // [0, 1)
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // N(mean, sigma^2). Consumes exactly two engine outputs per call.
  double normal(double mean, double sigma) {
    // u1 in (0, 1] so the log is finite.
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + sigma * z;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace circumnav
