#pragma once

#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace stem {

// Two-scale linear background model: lambda0(t) = a1 * Control 1 Kb window
// average + a2 * Control 10 Kb window average, floored globally by lambda_L.
struct BackgroundModel {
  double a1 = 0.0, a2 = 0.0;
  double a1_se = 0.0, a2_se = 0.0;
  double lambda_L = 0.0;
  int64_t window_small = 1000;
  int64_t window_large = 10000;
};

// Mean count per bp over positions [center - width/2, center + width/2],
// clipped to the chromosome; the clipped position count replaces the width
// as denominator when the window sticks out.
double window_average(const CountTrack& track, const std::string& chrom, int64_t center, int64_t width);

struct BinRow {
  std::string chrom;
  int64_t bin_start = 0;
  double ip_avg = 0.0, c1k_avg = 0.0, c10k_avg = 0.0;
};

// Least squares through the origin of the IP 1 Kb bin averages on the
// Control 1 Kb and enclosing 10 Kb bin averages, over disjoint bins of the
// whole genome. Optionally dumps the regression rows with any coverage.
BackgroundModel fit_background_regression(const CountTrack& ip, const CountTrack& control,
                                          int64_t window_small = 1000, int64_t window_large = 10000,
                                          std::vector<BinRow>* dump = nullptr);

// Total aligned IP tag count divided by the genome length.
double global_rate(const CountTrack& ip, double genome_length);

// (lambda0, lambda0_plus) at position t using sliding windows centered at t.
std::pair<double, double> background_at(const BackgroundModel& model, const CountTrack& control,
                                        const std::string& chrom, int64_t t);

}  // namespace stem
