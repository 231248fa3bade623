#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "multitest.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace stem {

struct SpikeInConfig {
  int64_t length = 10000000;
  int n_spikes = 20;
  double snr = 10.0;  // S
  double control_to_ip = 0.8;
  double synth_a1 = 0.3, synth_a2 = 0.7;
  int64_t window_small = 1000, window_large = 10000;
  // synthetic template: piecewise-constant block rates, constant floor plus
  // a lognormal draw per block
  int64_t template_block = 25000;
  double template_base_rate = 0.001;
  double template_median = 0.0018;
  double template_sigma = 0.7;
};

// Dense per-position rate function over [0, L).
struct RateTrack {
  std::vector<double> v;
  int64_t length() const { return static_cast<int64_t>(v.size()); }
  double mean() const;
};

struct GroundTruth {
  std::string chrom = "sim";
  std::vector<int64_t> centers;  // sorted
  int64_t support_half = 0;      // support = [center - half, center + half]
};

// Synthetic template counts when no real Control track is supplied.
CountTrack synth_template(const SpikeInConfig& cfg, Rng& rng);

// lambda_C(t) = a1 * 1 Kb window average + a2 * 10 Kb window average of the
// template counts; lambda_0(t) = control_to_ip * lambda_C(t).
struct SynthRates {
  RateTrack lambda_c;
  RateTrack lambda_0;
};
SynthRates synth_rates(const CountTrack& control_template, const SpikeInConfig& cfg);

// Place n disjoint spikes uniformly at random; each spike is the peak shape
// scaled so that the matched-filter response at its center is exactly
// mean(lambda0), making S the realized signal-to-noise ratio:
// lambda_IP = lambda_0 + S * sum of spikes.
struct SpikeResult {
  RateTrack lambda_ip;
  GroundTruth truth;
};
SpikeResult place_spikes(const RateTrack& lambda0, const Kernel& shape, const SpikeInConfig& cfg,
                         Rng& rng);

// Independent Poisson draw at every position; sparse output.
CountTrack sample_track(const RateTrack& rates, Rng& rng, const std::string& chrom = "sim");

struct Score {
  int64_t detections = 0;
  int64_t true_detections = 0;
  int64_t false_detections = 0;
  int spikes_recovered = 0;
  int n_spikes = 0;
  double fdp = 0.0;    // false detections / max(1, detections)
  double power = 0.0;  // spikes with >= 1 detection / n_spikes
};

// A detected peak is true iff its position lies inside some spike support.
// Multiple detections in one support each count as detections but recover
// the spike once.
Score score_detections(const std::vector<Peak>& detected, const GroundTruth& truth);

}  // namespace stem
