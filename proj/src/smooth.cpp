#include "smooth.hpp"

#include <algorithm>

namespace stem {

SmoothTrack convolve(const CountTrack& track, const Kernel& kernel, int64_t group_gap) {
  kernel.validate();
  const int64_t h = kernel.half();
  const int64_t gap = std::max(group_gap, kernel.width());

  SmoothTrack out;
  out.lengths = track.lengths;
  out.kernel_half = h;
  out.kernel_fp = kernel.fingerprint();

  for (const auto& [chrom, cc] : track.chroms) {
    const int64_t len = track.length_of(chrom);
    auto& groups = out.chroms[chrom];
    const size_t n = cc.pos.size();
    size_t i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n && cc.pos[j + 1] - cc.pos[j] <= gap) ++j;

      const int64_t lo = std::max<int64_t>(0, cc.pos[i] - h);
      const int64_t hi = std::min<int64_t>(len - 1, cc.pos[j] + h);
      SmoothGroup g;
      g.start = lo;
      g.v.assign(static_cast<size_t>(hi - lo + 1), 0.0);
      for (size_t k = i; k <= j; ++k) {
        const int64_t p = cc.pos[k];
        const double c = static_cast<double>(cc.count[k]);
        const int64_t t0 = std::max(lo, p - h);
        const int64_t t1 = std::min(hi, p + h);
        double* buf = g.v.data() + (t0 - lo);
        const double* w = kernel.w.data() + (t0 - p + h);
        for (int64_t t = t0; t <= t1; ++t) *buf++ += c * *w++;
      }
      groups.push_back(std::move(g));
      i = j + 1;
    }
  }
  return out;
}

std::vector<Candidate> local_maxima(const SmoothTrack& track) {
  std::vector<Candidate> out;
  for (const auto& [chrom, groups] : track.chroms) {
    const auto lit = track.lengths.find(chrom);
    const int64_t len = lit == track.lengths.end() ? kUnknownLength : lit->second;
    for (const auto& g : groups) {
      const auto& v = g.v;
      const size_t n = v.size();
      double prev = 0.0;  // zero padding outside the group
      size_t i = 0;
      while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;
        const double next = j + 1 < n ? v[j + 1] : 0.0;
        if (v[i] > prev && v[i] > next) {
          Candidate c;
          c.chrom = chrom;
          c.pos = g.start + static_cast<int64_t>(i);
          c.height = v[i];
          c.near_edge = len != kUnknownLength &&
                        (c.pos < track.kernel_half || c.pos >= len - track.kernel_half);
          out.push_back(std::move(c));
        }
        prev = v[i];
        i = j + 1;
      }
    }
  }
  return out;
}

}  // namespace stem
