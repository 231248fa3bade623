#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "types.hpp"

namespace stem {

// SplitMix64 finalizer; used to derive independent sub-stream seeds so that
// per-lambda / per-replicate work units are reproducible regardless of
// scheduling.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t root, uint64_t stream, uint64_t index = 0) {
  uint64_t s = splitmix64(root ^ 0x6A09E667F3BCC909ull);
  s = splitmix64(s ^ splitmix64(stream));
  return splitmix64(s + 0x9E3779B97F4A7C15ull * index);
}

// Seed stream tags (arbitrary distinct constants).
inline constexpr uint64_t kStreamTable = 0x7461626C65ull;      // survival table sims
inline constexpr uint64_t kStreamNullCdf = 0x67306e756cull;    // G0 height multisets
inline constexpr uint64_t kStreamTemplate = 0x74656d706cull;   // synthetic template
inline constexpr uint64_t kStreamSpikes = 0x7370696b65ull;     // spike placement
inline constexpr uint64_t kStreamIp = 0x6970747261ull;         // IP track draws
inline constexpr uint64_t kStreamControl = 0x63747261636bull;  // Control track draws

// mt19937_64 engine with explicitly-coded distributions. The standard
// distributions are implementation-defined bit-wise; these are not, which
// keeps seeded runs identical across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform01() {  // in [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Inversion by sequential search; exact for the small rates used here.
  int64_t poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda > 700.0) fail(ErrorCode::invalid, "poisson rate too large: " + std::to_string(lambda));
    const double u = uniform01();
    double p = std::exp(-lambda);
    double cum = p;
    int64_t k = 0;
    while (u > cum) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cum += p;
      if (k > 100000) break;  // guard against fp stall near u ~ 1
    }
    return k;
  }

  // Same as poisson() but with exp(-lambda) precomputed by the caller;
  // the hot path when sampling long constant-rate sequences.
  int64_t poisson_pre(double lambda, double exp_neg_lambda) {
    const double u = uniform01();
    if (u <= exp_neg_lambda) return 0;
    double p = exp_neg_lambda;
    double cum = p;
    int64_t k = 0;
    while (u > cum) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cum += p;
      if (k > 100000) break;
    }
    return k;
  }

  double normal() {  // Box-Muller, pairs cached
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(6.283185307179586476925286766559 * u2);
    have_spare_ = true;
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // median * exp(sigma * Z): lognormal parameterized by its median.
  double lognormal(double median, double sigma) {
    return median * std::exp(sigma * normal());
  }

  // uniform integer in [0, n)
  int64_t uniform_below(int64_t n) {
    return static_cast<int64_t>(uniform01() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace stem
