#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace slotmech {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 engine with hand-rolled distributions so that a given seed
// produces the same stream on every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  std::uint64_t next() { return eng_(); }

  // Uniform integer in [lo, hi], rejection sampled to avoid modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo >= hi) return lo;
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
  }

  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Knuth's product-of-uniforms sampler; fine for the lambdas used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

  // Index into `weights` proportional to weight.
  int weighted(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

private:
  std::mt19937_64 eng_;
};

// Independent stream for worker/repetition `stream` under one root seed.
inline std::uint64_t derive_stream_seed(std::uint64_t root_seed, std::uint64_t stream) {
  return splitmix64(root_seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

inline Rng derive_rng(std::uint64_t root_seed, std::uint64_t stream) {
  return Rng(derive_stream_seed(root_seed, stream));
}

}  // namespace slotmech
