#pragma once

#include <string>
#include <vector>

#include "kernel.hpp"
#include "smooth.hpp"
#include "tags.hpp"
#include "types.hpp"

namespace stem {

// Mean per-strand tag counts by offset from strong-peak centers.
struct StrandProfile {
  int64_t window = 0;  // odd
  std::vector<double> forward;  // index i = offset i - (window-1)/2
  std::vector<double> reverse;
  int64_t n_peaks = 0;

  int64_t half() const { return (window - 1) / 2; }
};

// The n highest local maxima of the smoothed track, ordered by height
// descending with ties broken by lower address. Returns all maxima (and
// sets *short_of_n) when fewer than n exist.
std::vector<Candidate> preliminary_peaks(const CountTrack& track, const Kernel& prelim_kernel, int n,
                                         bool* short_of_n = nullptr);

// Entry i of the forward profile is the mean over centers t_j of the
// forward-tag count at t_j - (W-1)/2 + i; analogously for reverse.
StrandProfile strand_profiles(const std::vector<TagRecord>& tags, const std::string& chrom,
                              const std::vector<int64_t>& centers, int64_t window);

// Half the distance between the spline-fitted modes of the two strand
// profiles, rounded to the nearest integer. Errors if negative.
int64_t estimate_shift(const StrandProfile& profile, double knot_spacing = 25.0);

// Align the strand profiles by the shift, average, symmetrize about the
// center, spline-fit, crop to w_out, window by the quartic biweight, clamp
// negatives and normalize.
Kernel estimate_peak_shape(const StrandProfile& profile, int64_t shift, int64_t w_out,
                           double knot_spacing = 25.0);

}  // namespace stem
