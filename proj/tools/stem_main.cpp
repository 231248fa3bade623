// Command-line front end for the stem shared library. All work happens
// behind the C API; this file only maps flags onto config keys.

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "stem/stem.h"

namespace {

// Flag values are kept as the raw strings the user typed and handed to the
// config verbatim, in command-line order.
struct KeyedOptions {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> values;

  void add(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    auto holder = std::make_shared<std::string>();
    cmd->add_option_function<std::string>(
           flag,
           [this, key, holder](const std::string& v) { values.emplace_back(key, v); },
           help)
        ->type_name("TEXT");
  }

  void add_flag(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_flag_callback(
        flag, [this, key] { values.emplace_back(key, "1"); }, help);
  }

  int apply(stem_config* cfg) const {
    if (!config_file.empty()) {
      if (stem_config_load(cfg, config_file.c_str()) != STEM_OK) return 1;
    }
    for (const auto& [k, v] : values)
      if (stem_config_set(cfg, k.c_str(), v.c_str()) != STEM_OK) return 1;
    return 0;
  }
};

void add_common(CLI::App* cmd, KeyedOptions& opts) {
  cmd->add_option("--config", opts.config_file, "key=value config file (flags override it)");
  opts.add(cmd, "--out", "out", "output directory");
  opts.add(cmd, "--seed", "seed", "root random seed");
  opts.add(cmd, "--threads", "threads", "worker thread count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stem: peak detection for stranded tag count data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(stem_version()));

  KeyedOptions align_opts, table_opts, call_opts, sim_opts, diag_opts;

  auto* align = app.add_subcommand("align", "estimate the strand shift and peak-shape kernel");
  add_common(align, align_opts);
  align_opts.add(align, "--ip", "ip", "IP tag file (chrom, start, end, strand)");
  align_opts.add(align, "--chrom-lengths", "chrom_lengths", "chromosome lengths file");
  align_opts.add(align, "--chrom", "shape_chrom", "chromosome to estimate on (default: longest)");
  align_opts.add(align, "--tentative-shift", "tentative_shift", "tentative shift for strong-peak detection (bp)");
  align_opts.add(align, "--prelim-sigma", "prelim_sigma", "preliminary Gaussian kernel sigma (bp)");
  align_opts.add(align, "--n-peaks", "n_strong_peaks", "number of strong peaks to average");
  align_opts.add(align, "--profile-window", "profile_window", "strand profile window (odd bp)");
  align_opts.add(align, "--kernel-window", "kernel_window", "output kernel width (odd bp)");

  auto* table = app.add_subcommand("table", "build the Monte Carlo survival table");
  add_common(table, table_opts);
  table_opts.add(table, "--kernel", "kernel", "kernel file from align");
  table_opts.add(table, "--lambda-min", "table_lambda_min", "smallest background rate in the data");
  table_opts.add(table, "--lambda-max", "table_lambda_max", "largest background rate in the data");
  table_opts.add(table, "--margin", "table_margin", "safety margin around the data range");
  table_opts.add(table, "--lambda-grid", "lambda_grid_size", "number of rate grid points");
  table_opts.add(table, "--u-grid", "u_grid_size", "number of height grid points");

  auto* call = app.add_subcommand("call", "call peaks on aligned IP/Control data");
  add_common(call, call_opts);
  call_opts.add(call, "--ip", "ip", "IP tag file");
  call_opts.add(call, "--control", "control", "Control tag file");
  call_opts.add(call, "--ip-track", "ip_track", "pre-aligned IP track (chrom, position, count)");
  call_opts.add(call, "--control-track", "control_track", "pre-aligned Control track");
  call_opts.add(call, "--chrom-lengths", "chrom_lengths", "chromosome lengths file");
  call_opts.add(call, "--shift", "shift", "strand shift from align (bp)");
  call_opts.add(call, "--kernel", "kernel", "kernel file from align");
  call_opts.add(call, "--table", "table", "survival table file (built on the fly when absent)");
  call_opts.add(call, "--q", "q", "FDR level");
  call_opts.add(call, "--genome-length", "genome_length", "genome length for the global rate floor");
  call_opts.add_flag(call, "--dump-candidates", "dump_candidates", "write candidates.tsv");
  call_opts.add_flag(call, "--dump-bins", "dump_bins", "write regression bin table");
  call_opts.add_flag(call, "--dump-tracks", "dump_tracks", "write aligned tracks");

  auto* sim = app.add_subcommand("simulate", "spike-in experiment with known ground truth");
  add_common(sim, sim_opts);
  sim_opts.add(sim, "--length", "sim_length", "simulated sequence length (bp)");
  sim_opts.add(sim, "--spikes", "sim_spikes", "number of planted spikes");
  sim_opts.add(sim, "--snr", "sim_snr", "comma-separated signal-to-noise ratios");
  sim_opts.add(sim, "--replicates", "sim_replicates", "replicates per SNR");
  sim_opts.add(sim, "--q", "sim_q", "nominal FDR level");
  sim_opts.add(sim, "--kernel", "kernel", "peak-shape kernel (default: built-in synthetic shape)");
  sim_opts.add(sim, "--template", "template", "Control template track for the background rates");
  sim_opts.add(sim, "--template-block", "template_block", "synthetic template block length (bp)");
  sim_opts.add(sim, "--template-base-rate", "template_base_rate", "synthetic template constant floor");
  sim_opts.add(sim, "--template-median", "template_median", "synthetic template lognormal median");
  sim_opts.add(sim, "--template-sigma", "template_sigma", "synthetic template lognormal sigma");

  auto* diag = app.add_subcommand("diagnose", "p-value distribution diagnostics");
  add_common(diag, diag_opts);
  diag_opts.add(diag, "--ip", "ip", "IP tag file");
  diag_opts.add(diag, "--control", "control", "Control tag file");
  diag_opts.add(diag, "--ip-track", "ip_track", "pre-aligned IP track");
  diag_opts.add(diag, "--control-track", "control_track", "pre-aligned Control track");
  diag_opts.add(diag, "--chrom-lengths", "chrom_lengths", "chromosome lengths file");
  diag_opts.add(diag, "--shift", "shift", "strand shift (bp)");
  diag_opts.add(diag, "--kernel", "kernel", "kernel file");
  diag_opts.add(diag, "--table", "table", "survival table file");
  diag_opts.add(diag, "--q", "q", "FDR level");
  diag_opts.add(diag, "--p-grid", "p_grid_size", "p grid size for the diagnostics table");
  diag_opts.add_flag(diag, "--empirical-null", "empirical_null",
                     "also run Control-as-IP for an empirical null curve");

  CLI11_PARSE(app, argc, argv);

  stem_config* cfg = stem_config_new();
  int rc = 0;
  const KeyedOptions* opts = nullptr;
  int (*run)(const stem_config*) = nullptr;
  if (align->parsed()) {
    opts = &align_opts;
    run = stem_run_align;
  } else if (table->parsed()) {
    opts = &table_opts;
    run = stem_run_table;
  } else if (call->parsed()) {
    opts = &call_opts;
    run = stem_run_call;
  } else if (sim->parsed()) {
    opts = &sim_opts;
    run = stem_run_simulate;
  } else if (diag->parsed()) {
    opts = &diag_opts;
    run = stem_run_diagnose;
  }

  if (opts && run) {
    rc = opts->apply(cfg);
    if (rc == 0) rc = run(cfg);
    if (rc != 0) std::fprintf(stderr, "stem: error: %s\n", stem_last_error());
  }
  stem_config_free(cfg);
  return rc == 0 ? 0 : 1;
}
