#pragma once

#include <map>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "types.hpp"

namespace stem {

// Smoothed values are only nonzero within half a kernel width of a nonzero
// count, so the smoothed track is stored as dense buffers over "groups" of
// nearby tags separated by long runs of zeros.
struct SmoothGroup {
  int64_t start = 0;
  std::vector<double> v;
};

struct SmoothTrack {
  std::map<std::string, std::vector<SmoothGroup>> chroms;
  std::map<std::string, int64_t> lengths;
  int64_t kernel_half = 0;
  uint64_t kernel_fp = 0;
};

struct Candidate {
  std::string chrom;
  int64_t pos = 0;
  double height = 0.0;
  bool near_edge = false;  // within half a kernel width of a chromosome end
};

// out(t) = sum_s w(s) * count(t - s); positions outside the chromosome are
// zero. Tags further apart than max(group_gap, kernel width) are processed
// as independent groups.
SmoothTrack convolve(const CountTrack& track, const Kernel& kernel, int64_t group_gap = 10000);

// All local maxima in address order. A maximal run of equal values that is
// higher than both flanking values yields one candidate at the run's lowest
// address; equality is exact (equal values arise from identical integer
// count patterns).
std::vector<Candidate> local_maxima(const SmoothTrack& track);

}  // namespace stem
