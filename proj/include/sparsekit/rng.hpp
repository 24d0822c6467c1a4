#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace sparsekit {

// splitmix64 step (Steele, Lea, Flood 2014). Advances the state and returns
// the next output word. Used both as the stream generator and as the seed
// mixing function so results do not depend on the platform's <random>.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// hash64(a, b) = splitmix64 applied to a, xored into b, mixed again.
inline std::uint64_t hash64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a;
  std::uint64_t h = splitmix64(s);
  s = h ^ b;
  return splitmix64(s);
}

// Seed splitting rule used throughout: fold each part into the running hash.
// derive_seed(master, {trial, stage}) == hash64(hash64(master, trial), stage).
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = master;
  for (std::uint64_t p : parts) h = hash64(h, p);
  return h;
}

// Stage tags for per-trial seed derivation. Values are part of the
// reproducibility contract; never renumber.
enum class SeedStage : std::uint64_t {
  history = 1,
  signal = 2,
  sensing_matrix = 3,
  noise = 4,
  updates = 5,
  network = 6,
  innovation = 7,
};

// Deterministic random stream. All distributions are derived from the
// splitmix64 output with explicit arithmetic, so a given seed produces the
// same sequence on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform on (0, 1]; never returns 0 so log() below is safe.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() <= p; }

  // Standard normal via Box-Muller; the second value of the pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform integer in [0, n) by rejection, free of modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sparsekit
