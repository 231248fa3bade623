#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace stem {

// Odd-length symmetric unimodal nonnegative weight vector with unit sum.
// Doubles as the estimated peak shape and as the matched smoothing filter.
struct Kernel {
  std::vector<double> w;

  int64_t width() const { return static_cast<int64_t>(w.size()); }
  int64_t half() const { return (width() - 1) / 2; }

  double at(int64_t offset) const {
    const int64_t i = offset + half();
    return (i < 0 || i >= width()) ? 0.0 : w[static_cast<size_t>(i)];
  }

  // Weight at offset 0: the height of a local maximum produced by one
  // isolated count.
  double mode_weight() const { return w[w.size() / 2]; }

  double sum_sq() const;
  uint64_t fingerprint() const;
  void validate() const;  // odd length, nonnegative, unit sum
};

// Quartic biweight window b(t) = (1 - (2t/(W-1))^2)^2, b(0)=1, endpoints 0.
std::vector<double> quartic_biweight(int64_t W);

Kernel make_kernel(std::vector<double> weights);  // normalizes to unit sum
Kernel gaussian_kernel(double sigma);             // truncated at +-4 sigma
Kernel biweight_kernel(int64_t W);

// Fallback peak shape for simulations when no estimated kernel is supplied:
// a heavy-tailed unimodal core (1 + (t/core)^2)^-2 under a quartic biweight
// window, mimicking the spread of aligned tag counts around a binding site.
Kernel synthetic_peak_shape(int64_t W = 801, double core = 80.0);

void write_kernel(const std::string& path, const Kernel& k);
Kernel read_kernel(const std::string& path);

}  // namespace stem
