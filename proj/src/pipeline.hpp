#pragma once

#include <string>
#include <vector>

#include "background.hpp"
#include "config.hpp"
#include "multitest.hpp"
#include "shape.hpp"
#include "simulate.hpp"
#include "survival.hpp"
#include "types.hpp"

namespace stem {

struct AlignResult {
  std::string chrom;
  int64_t shift = 0;
  Kernel kernel;
  StrandProfile profile;
  int64_t tags_in = 0, tags_dedup = 0;
  bool short_of_n = false;
};

struct CallResult {
  std::vector<Peak> peaks;  // ranked; significant first
  BackgroundModel model;
  SurvivalTable table;
  int64_t tags_ip_in = 0, tags_ip_dedup = 0, tags_ip_dropped = 0;
  int64_t tags_control_in = 0, tags_control_dedup = 0, tags_control_dropped = 0;
  int64_t n_candidates = 0, n_near_edge = 0;
  int64_t n_significant = 0, n_below_resolution = 0;
  double lambda0p_min = 0.0, lambda0p_max = 0.0;
  bool empty_input = false;
};

struct SimReplicate {
  double snr = 0.0;
  int replicate = 0;
  Score score;
  double corr_lambda0 = 0.0;  // Pearson corr of true vs estimated background
  double a1 = 0.0, a2 = 0.0;
  int64_t candidates = 0, significant = 0;
};

struct SimResult {
  std::vector<SimReplicate> rows;
  double mean_fdp(double snr) const;
  double mean_power(double snr) const;
};

// The testing stages shared by call/diagnose/simulate: background fit,
// smoothing, candidate extraction, survival table, p-values, BH, ranking.
CallResult call_core(const CountTrack& ip, const CountTrack& control, const Kernel& kernel,
                     const RunConfig& cfg, const SurvivalTable* preloaded_table);

AlignResult run_align(const RunConfig& cfg);
void run_table(const RunConfig& cfg);
CallResult run_call(const RunConfig& cfg);
SimResult run_simulate(const RunConfig& cfg);
void run_diagnose(const RunConfig& cfg);

}  // namespace stem
