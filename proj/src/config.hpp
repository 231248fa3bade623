#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace stem {

// All knobs for the pipeline, settable from key=value config files and
// command-line flags (flags win). Defaults follow the published analysis
// defaults where one exists.
struct RunConfig {
  // inputs / outputs
  std::string ip_path, control_path;
  std::string ip_track_path, control_track_path;
  std::string chrom_lengths_path;
  std::string kernel_path, table_path, template_path;
  std::string out_dir = ".";

  // alignment / shape estimation
  int64_t shift = 0;
  int64_t tentative_shift = 100;
  double prelim_sigma = 50.0;
  int n_strong_peaks = 1000;
  int64_t profile_window = 2001;
  int64_t kernel_window = 801;
  double spline_knot_spacing = 25.0;
  std::string shape_chrom;  // empty: longest chromosome

  // background
  int64_t window_small = 1000;
  int64_t window_large = 10000;
  double genome_length = 3.018e9;

  // survival table
  int lambda_grid_size = 300;
  int u_grid_size = 200;
  double table_margin = 0.25;
  int64_t sim_min_length = 100000;
  int64_t sim_min_nonzero = 100;
  double table_lambda_min = 0.0, table_lambda_max = 0.0;  // data range for `table`

  // testing / diagnostics
  double q = 0.01;
  int64_t g0_sim_length = 2000000;
  int p_grid_size = 1001;
  bool empirical_null = false;

  // spike-in simulation
  int64_t sim_length = 10000000;
  int sim_spikes = 20;
  std::vector<double> sim_snr = {5.0, 10.0, 15.0};
  int sim_replicates = 10;
  double sim_q = 0.1;
  double sim_control_to_ip = 0.8;
  double sim_a1 = 0.3, sim_a2 = 0.7;
  int64_t template_block = 25000;
  double template_base_rate = 0.001;
  double template_median = 0.0018;
  double template_sigma = 0.7;

  // misc
  uint64_t seed = 20120801;
  int threads = 1;
  bool dump_candidates = false;
  bool dump_bins = false;
  bool dump_tracks = false;

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  void load_file(const std::string& path);
};

}  // namespace stem
