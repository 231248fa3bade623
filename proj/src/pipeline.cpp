#include "pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tags.hpp"

namespace stem {

namespace {

void log_msg(const std::string& msg) { std::cerr << "[stem] " << msg << "\n"; }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory: " + dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

struct Report {
  std::vector<std::pair<std::string, std::string>> rows;
  void put(const std::string& k, const std::string& v) { rows.emplace_back(k, v); }
  void put(const std::string& k, int64_t v) { rows.emplace_back(k, std::to_string(v)); }
  void put(const std::string& k, double v) { rows.emplace_back(k, num(v)); }
  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot write report: " + path);
    for (const auto& [k, v] : rows) out << k << '=' << v << '\n';
  }
};

struct LoadedTags {
  CountTrack track;
  int64_t n_in = 0, n_dedup = 0, n_dropped = 0;
};

LoadedTags load_aligned(const std::string& tag_path, const std::string& track_path, int64_t shift,
                        const std::map<std::string, int64_t>& lengths, const char* which) {
  if (!tag_path.empty() && !track_path.empty())
    fail(ErrorCode::invalid, std::string(which) + ": give either a tag file or a track file, not both");
  LoadedTags out;
  if (!track_path.empty()) {
    out.track = read_track(track_path, lengths);
    out.n_in = out.n_dedup = out.track.total_count();
    return out;
  }
  if (tag_path.empty()) fail(ErrorCode::invalid, std::string(which) + " input is required");
  auto tags = read_tags(tag_path);
  out.n_in = static_cast<int64_t>(tags.size());
  tags = dedup_tags(tags);
  out.n_dedup = static_cast<int64_t>(tags.size());
  auto aligned = shift_and_count(tags, shift, lengths);
  out.track = std::move(aligned.track);
  out.n_dropped = aligned.n_dropped;
  return out;
}

void write_peaks(const std::string& path, const std::vector<Peak>& peaks) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write peak table: " + path);
  out << "rank\tchrom\tposition\theight\tlambda0\tlambda0_plus\tsnr\tpvalue\tbelow_resolution\tsignificant\n";
  for (const auto& p : peaks)
    out << p.rank << '\t' << p.chrom << '\t' << p.pos << '\t' << num(p.height) << '\t'
        << num(p.lambda0) << '\t' << num(p.lambda0_plus) << '\t' << num(p.snr) << '\t' << num(p.p)
        << '\t' << (p.below_resolution ? 1 : 0) << '\t' << (p.significant ? 1 : 0) << '\n';
  if (!out) fail(ErrorCode::io, "error writing peak table: " + path);
}

void write_candidates(const std::string& path, const std::vector<Candidate>& cands) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write candidate dump: " + path);
  out << "#chrom\tposition\theight\n";
  for (const auto& c : cands) out << c.chrom << '\t' << c.pos << '\t' << num(c.height) << '\n';
}

void write_bins(const std::string& path, const std::vector<BinRow>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write regression bin dump: " + path);
  out << "#chrom\tbin_start\tip_avg\tc1k_avg\tc10k_avg\n";
  for (const auto& r : rows)
    out << r.chrom << '\t' << r.bin_start << '\t' << num(r.ip_avg) << '\t' << num(r.c1k_avg) << '\t'
        << num(r.c10k_avg) << '\n';
}

std::map<std::string, int64_t> maybe_lengths(const RunConfig& cfg) {
  if (cfg.chrom_lengths_path.empty()) {
    log_msg("no chromosome lengths file given; tags are only dropped below position 0");
    return {};
  }
  return read_chrom_lengths(cfg.chrom_lengths_path);
}

TableOptions table_options(const RunConfig& cfg) {
  TableOptions opt;
  opt.n_lambda = cfg.lambda_grid_size;
  opt.n_u = cfg.u_grid_size;
  opt.margin = cfg.table_margin;
  opt.sim_min_length = cfg.sim_min_length;
  opt.sim_min_nonzero = cfg.sim_min_nonzero;
  opt.threads = cfg.threads;
  return opt;
}

}  // namespace

CallResult call_core(const CountTrack& ip, const CountTrack& control, const Kernel& kernel,
                     const RunConfig& cfg, const SurvivalTable* preloaded_table) {
  CallResult r;
  r.model.lambda_L = global_rate(ip, cfg.genome_length);
  if (ip.empty()) {
    log_msg("IP track is empty; nothing to test");
    r.empty_input = true;
    return r;
  }

  auto model = fit_background_regression(ip, control, cfg.window_small, cfg.window_large);
  model.lambda_L = r.model.lambda_L;
  r.model = model;

  const auto smooth = convolve(ip, kernel);
  const auto cands = local_maxima(smooth);
  r.n_candidates = static_cast<int64_t>(cands.size());
  if (cands.empty()) {
    r.empty_input = true;
    return r;
  }

  r.peaks.reserve(cands.size());
  r.lambda0p_min = std::numeric_limits<double>::infinity();
  r.lambda0p_max = 0.0;
  for (const auto& c : cands) {
    const auto [lam0, lam0p] = background_at(model, control, c.chrom, c.pos);
    Peak p;
    p.chrom = c.chrom;
    p.pos = c.pos;
    p.height = c.height;
    p.lambda0 = lam0;
    p.lambda0_plus = lam0p;
    p.snr = c.height / (lam0 > 0.0 ? lam0 : lam0p);
    p.near_edge = c.near_edge;
    if (c.near_edge) ++r.n_near_edge;
    r.lambda0p_min = std::min(r.lambda0p_min, lam0p);
    r.lambda0p_max = std::max(r.lambda0p_max, lam0p);
    r.peaks.push_back(std::move(p));
  }

  if (preloaded_table) {
    if (preloaded_table->kernel_fp != kernel.fingerprint())
      fail(ErrorCode::state,
           "survival table kernel fingerprint mismatch; rebuild the table for this kernel");
    if (r.lambda0p_min < preloaded_table->lambda_min() ||
        r.lambda0p_max > preloaded_table->lambda_max())
      fail(ErrorCode::state, "data lambda0+ range [" + num(r.lambda0p_min) + ", " +
                                 num(r.lambda0p_max) + "] exceeds the survival table range");
    r.table = *preloaded_table;
  } else {
    r.table = build_table(r.lambda0p_min, r.lambda0p_max, kernel, cfg.seed, table_options(cfg));
  }

  for (auto& p : r.peaks) {
    const auto pv = lookup(r.table, p.height, p.lambda0_plus);
    p.p = pv.p;
    p.below_resolution = pv.below_resolution;
    if (pv.below_resolution) ++r.n_below_resolution;
  }

  bh_mark(r.peaks, cfg.q);
  for (const auto& p : r.peaks) r.n_significant += p.significant ? 1 : 0;
  rank_peaks(r.peaks);
  return r;
}

AlignResult run_align(const RunConfig& cfg) {
  if (cfg.ip_path.empty()) fail(ErrorCode::invalid, "align needs an IP tag file (ip)");
  const auto lengths = maybe_lengths(cfg);

  auto tags = read_tags(cfg.ip_path);
  AlignResult res;
  res.tags_in = static_cast<int64_t>(tags.size());
  tags = dedup_tags(tags);
  res.tags_dedup = static_cast<int64_t>(tags.size());
  if (tags.empty()) fail(ErrorCode::invalid, "no tags after deduplication");

  // shape is estimated on one long chromosome: the longest by declared
  // length, or by tag span when lengths are unknown
  std::string chrom = cfg.shape_chrom;
  if (chrom.empty()) {
    if (!lengths.empty()) {
      int64_t best = -1;
      for (const auto& [c, len] : lengths)
        if (len > best) {
          best = len;
          chrom = c;
        }
    } else {
      std::map<std::string, int64_t> span;
      for (const auto& t : tags) span[t.chrom] = std::max(span[t.chrom], t.location());
      int64_t best = -1;
      for (const auto& [c, len] : span)
        if (len > best) {
          best = len;
          chrom = c;
        }
    }
  }
  res.chrom = chrom;

  std::vector<TagRecord> chrom_tags;
  for (const auto& t : tags)
    if (t.chrom == chrom) chrom_tags.push_back(t);
  if (chrom_tags.empty()) fail(ErrorCode::invalid, "no tags on shape chromosome '" + chrom + "'");

  const auto tentative = shift_and_count(chrom_tags, cfg.tentative_shift, lengths);
  const auto prelim = gaussian_kernel(cfg.prelim_sigma);
  bool short_of_n = false;
  const auto strong = preliminary_peaks(tentative.track, prelim, cfg.n_strong_peaks, &short_of_n);
  res.short_of_n = short_of_n;
  if (short_of_n)
    log_msg("only " + std::to_string(strong.size()) + " strong peaks available (requested " +
            std::to_string(cfg.n_strong_peaks) + ")");

  std::vector<int64_t> centers;
  centers.reserve(strong.size());
  for (const auto& c : strong) centers.push_back(c.pos);

  res.profile = strand_profiles(chrom_tags, chrom, centers, cfg.profile_window);
  res.shift = estimate_shift(res.profile, cfg.spline_knot_spacing);
  res.kernel = estimate_peak_shape(res.profile, res.shift, cfg.kernel_window, cfg.spline_knot_spacing);

  ensure_dir(cfg.out_dir);
  {
    std::ofstream out(join(cfg.out_dir, "shift.txt"));
    out << res.shift << '\n';
  }
  write_kernel(join(cfg.out_dir, "kernel.tsv"), res.kernel);
  {
    std::ofstream out(join(cfg.out_dir, "profiles.tsv"));
    out << "#offset\tforward\treverse\n";
    const int64_t h = res.profile.half();
    for (int64_t o = -h; o <= h; ++o)
      out << o << '\t' << num(res.profile.forward[static_cast<size_t>(o + h)]) << '\t'
          << num(res.profile.reverse[static_cast<size_t>(o + h)]) << '\n';
  }
  Report rep;
  rep.put("stage", "align");
  rep.put("chrom", res.chrom);
  rep.put("tags_in", res.tags_in);
  rep.put("tags_dedup", res.tags_dedup);
  rep.put("strong_peaks", static_cast<int64_t>(centers.size()));
  rep.put("shift", res.shift);
  rep.put("kernel_window", cfg.kernel_window);
  rep.put("kernel_mode_weight", res.kernel.mode_weight());
  rep.write(join(cfg.out_dir, "align_report.txt"));
  log_msg("align: shift " + std::to_string(res.shift) + " on " + res.chrom);
  return res;
}

void run_table(const RunConfig& cfg) {
  if (cfg.kernel_path.empty()) fail(ErrorCode::invalid, "table needs a kernel file (kernel)");
  if (!(cfg.table_lambda_min > 0.0) || !(cfg.table_lambda_max >= cfg.table_lambda_min))
    fail(ErrorCode::invalid, "table needs a valid data lambda range (table_lambda_min/max)");
  const auto kernel = read_kernel(cfg.kernel_path);
  const auto t = build_table(cfg.table_lambda_min, cfg.table_lambda_max, kernel, cfg.seed,
                             table_options(cfg));
  ensure_dir(cfg.out_dir);
  write_table(join(cfg.out_dir, "table.tsv"), t);
  log_msg("table: " + std::to_string(t.lambda_grid.size()) + " x " + std::to_string(t.u_grid.size()) +
          " grid over lambda [" + num(t.lambda_min()) + ", " + num(t.lambda_max()) + "]");
}

CallResult run_call(const RunConfig& cfg) {
  if (cfg.kernel_path.empty()) fail(ErrorCode::invalid, "call needs a kernel file (kernel)");
  const auto kernel = read_kernel(cfg.kernel_path);
  const auto lengths = maybe_lengths(cfg);

  SurvivalTable preloaded;
  const bool have_table = !cfg.table_path.empty();
  if (have_table) {
    preloaded = read_table(cfg.table_path);
    if (preloaded.kernel_fp != kernel.fingerprint())
      fail(ErrorCode::state,
           "survival table kernel fingerprint mismatch; rebuild the table for this kernel");
  }

  const auto ip = load_aligned(cfg.ip_path, cfg.ip_track_path, cfg.shift, lengths, "IP");
  const auto control = load_aligned(cfg.control_path, cfg.control_track_path, cfg.shift, lengths, "Control");

  ensure_dir(cfg.out_dir);
  if (cfg.dump_tracks) {
    write_track(join(cfg.out_dir, "ip_track.tsv"), ip.track);
    write_track(join(cfg.out_dir, "control_track.tsv"), control.track);
  }

  CallResult r;
  if (ip.track.empty()) {
    log_msg("warning: IP input is empty; writing an empty peak table");
    r.empty_input = true;
    r.model.lambda_L = 0.0;
  } else {
    std::vector<BinRow> bins;
    r = call_core(ip.track, control.track, kernel, cfg, have_table ? &preloaded : nullptr);
    if (cfg.dump_bins) {
      fit_background_regression(ip.track, control.track, cfg.window_small, cfg.window_large, &bins);
      write_bins(join(cfg.out_dir, "bins.tsv"), bins);
    }
    if (cfg.dump_candidates) {
      std::vector<Candidate> cands;
      cands.reserve(r.peaks.size());
      for (const auto& p : r.peaks) cands.push_back(Candidate{p.chrom, p.pos, p.height, p.near_edge});
      std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.chrom != b.chrom ? a.chrom < b.chrom : a.pos < b.pos;
      });
      write_candidates(join(cfg.out_dir, "candidates.tsv"), cands);
    }
    if (!have_table && !r.empty_input) write_table(join(cfg.out_dir, "table.tsv"), r.table);
  }
  r.tags_ip_in = ip.n_in;
  r.tags_ip_dedup = ip.n_dedup;
  r.tags_ip_dropped = ip.n_dropped;
  r.tags_control_in = control.n_in;
  r.tags_control_dedup = control.n_dedup;
  r.tags_control_dropped = control.n_dropped;

  write_peaks(join(cfg.out_dir, "peaks.tsv"), r.peaks);

  Report rep;
  rep.put("stage", "call");
  rep.put("shift", cfg.shift);
  rep.put("q", cfg.q);
  rep.put("seed", static_cast<int64_t>(cfg.seed));
  rep.put("tags_ip_in", r.tags_ip_in);
  rep.put("tags_ip_dedup", r.tags_ip_dedup);
  rep.put("tags_ip_dropped", r.tags_ip_dropped);
  rep.put("tags_control_in", r.tags_control_in);
  rep.put("tags_control_dedup", r.tags_control_dedup);
  rep.put("tags_control_dropped", r.tags_control_dropped);
  rep.put("lambda_L", r.model.lambda_L);
  rep.put("a1", r.model.a1);
  rep.put("a1_se", r.model.a1_se);
  rep.put("a2", r.model.a2);
  rep.put("a2_se", r.model.a2_se);
  rep.put("candidates", r.n_candidates);
  rep.put("candidates_near_edge", r.n_near_edge);
  rep.put("lambda0_plus_min", r.lambda0p_min);
  rep.put("lambda0_plus_max", r.lambda0p_max);
  rep.put("below_resolution", r.n_below_resolution);
  rep.put("significant", r.n_significant);
  rep.write(join(cfg.out_dir, "run_report.txt"));
  log_msg("call: " + std::to_string(r.n_significant) + " significant of " +
          std::to_string(r.n_candidates) + " candidates");
  return r;
}

double SimResult::mean_fdp(double snr) const {
  double s = 0.0;
  int n = 0;
  for (const auto& r : rows)
    if (r.snr == snr) {
      s += r.score.fdp;
      ++n;
    }
  return n ? s / n : 0.0;
}

double SimResult::mean_power(double snr) const {
  double s = 0.0;
  int n = 0;
  for (const auto& r : rows)
    if (r.snr == snr) {
      s += r.score.power;
      ++n;
    }
  return n ? s / n : 0.0;
}

SimResult run_simulate(const RunConfig& cfg) {
  SpikeInConfig sc;
  sc.length = cfg.sim_length;
  sc.n_spikes = cfg.sim_spikes;
  sc.control_to_ip = cfg.sim_control_to_ip;
  sc.synth_a1 = cfg.sim_a1;
  sc.synth_a2 = cfg.sim_a2;
  sc.window_small = cfg.window_small;
  sc.window_large = cfg.window_large;
  sc.template_block = cfg.template_block;
  sc.template_base_rate = cfg.template_base_rate;
  sc.template_median = cfg.template_median;
  sc.template_sigma = cfg.template_sigma;

  const Kernel kernel = cfg.kernel_path.empty() ? synthetic_peak_shape(cfg.kernel_window)
                                                : read_kernel(cfg.kernel_path);

  CountTrack tmpl;
  if (cfg.template_path.empty()) {
    Rng rng(derive_seed(cfg.seed, kStreamTemplate));
    tmpl = synth_template(sc, rng);
  } else {
    tmpl = read_track(cfg.template_path);
  }
  const auto rates = synth_rates(tmpl, sc);
  if (rates.lambda_0.mean() <= 0.0) log_msg("warning: simulated background rate is all zero");

  RunConfig core_cfg = cfg;
  core_cfg.q = cfg.sim_q;
  core_cfg.genome_length = static_cast<double>(sc.length);

  SimResult result;
  for (size_t si = 0; si < cfg.sim_snr.size(); ++si) {
    for (int rep = 0; rep < cfg.sim_replicates; ++rep) {
      const uint64_t unit = static_cast<uint64_t>(si) * 1000 + static_cast<uint64_t>(rep);
      SpikeInConfig scr = sc;
      scr.snr = cfg.sim_snr[si];

      Rng place_rng(derive_seed(cfg.seed, kStreamSpikes, unit));
      const auto spikes = place_spikes(rates.lambda_0, kernel, scr, place_rng);

      Rng ip_rng(derive_seed(cfg.seed, kStreamIp, unit));
      const auto ip = sample_track(spikes.lambda_ip, ip_rng);
      Rng control_rng(derive_seed(cfg.seed, kStreamControl, unit));
      const auto control = sample_track(rates.lambda_c, control_rng);

      core_cfg.seed = derive_seed(cfg.seed, kStreamTable, unit);
      const auto core = call_core(ip, control, kernel, core_cfg, nullptr);

      std::vector<Peak> detected;
      for (const auto& p : core.peaks)
        if (p.significant) detected.push_back(p);

      SimReplicate row;
      row.snr = scr.snr;
      row.replicate = rep;
      row.score = score_detections(detected, spikes.truth);
      row.a1 = core.model.a1;
      row.a2 = core.model.a2;
      row.candidates = core.n_candidates;
      row.significant = core.n_significant;

      // correlation of the true and regression-estimated background rates
      if (!core.empty_input) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        const int64_t L = sc.length;
        for (int64_t t = 0; t < L; ++t) {
          const double x = rates.lambda_0.v[static_cast<size_t>(t)];
          const double y = background_at(core.model, control, "sim", t).first;
          sx += x;
          sy += y;
          sxx += x * x;
          syy += y * y;
          sxy += x * y;
        }
        const double n = static_cast<double>(L);
        const double cov = sxy - sx * sy / n;
        const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
        row.corr_lambda0 = vx > 0 && vy > 0 ? cov / std::sqrt(vx * vy) : 0.0;
      }
      result.rows.push_back(row);
      log_msg("simulate: S=" + num(row.snr) + " rep=" + std::to_string(rep) + " detections=" +
              std::to_string(row.score.detections) + " fdp=" + num(row.score.fdp) + " power=" +
              num(row.score.power));
    }
  }

  ensure_dir(cfg.out_dir);
  {
    std::ofstream out(join(cfg.out_dir, "simulate_replicates.tsv"));
    out << "snr\treplicate\tdetections\ttrue_detections\tfalse_detections\tspikes_recovered\t"
           "fdp\tpower\tcorr_lambda0\ta1\ta2\tcandidates\tsignificant\n";
    for (const auto& r : result.rows)
      out << num(r.snr) << '\t' << r.replicate << '\t' << r.score.detections << '\t'
          << r.score.true_detections << '\t' << r.score.false_detections << '\t'
          << r.score.spikes_recovered << '\t' << num(r.score.fdp) << '\t' << num(r.score.power)
          << '\t' << num(r.corr_lambda0) << '\t' << num(r.a1) << '\t' << num(r.a2) << '\t'
          << r.candidates << '\t' << r.significant << '\n';
  }
  {
    std::ofstream out(join(cfg.out_dir, "simulate_summary.tsv"));
    out << "snr\tmean_fdp\tmean_power\n";
    for (double s : cfg.sim_snr)
      out << num(s) << '\t' << num(result.mean_fdp(s)) << '\t' << num(result.mean_power(s)) << '\n';
  }
  return result;
}

void run_diagnose(const RunConfig& cfg) {
  if (cfg.kernel_path.empty()) fail(ErrorCode::invalid, "diagnose needs a kernel file (kernel)");
  const auto kernel = read_kernel(cfg.kernel_path);
  const auto lengths = maybe_lengths(cfg);

  SurvivalTable preloaded;
  const bool have_table = !cfg.table_path.empty();
  if (have_table) {
    preloaded = read_table(cfg.table_path);
    if (preloaded.kernel_fp != kernel.fingerprint())
      fail(ErrorCode::state,
           "survival table kernel fingerprint mismatch; rebuild the table for this kernel");
  }

  const auto ip = load_aligned(cfg.ip_path, cfg.ip_track_path, cfg.shift, lengths, "IP");
  const auto control = load_aligned(cfg.control_path, cfg.control_track_path, cfg.shift, lengths, "Control");
  if (ip.track.empty()) fail(ErrorCode::invalid, "diagnose needs a nonempty IP input");

  const auto core = call_core(ip.track, control.track, kernel, cfg, have_table ? &preloaded : nullptr);

  std::vector<double> pvals, lam0p;
  pvals.reserve(core.peaks.size());
  lam0p.reserve(core.peaks.size());
  for (const auto& p : core.peaks) {
    pvals.push_back(p.p);
    lam0p.push_back(p.lambda0_plus);
  }
  const auto g_hat = observed_pvalue_cdf(pvals);
  const auto g0_hat = null_mixture_cdf(lam0p, core.table, kernel, cfg.g0_sim_length);

  StepCDF g_empirical;
  if (cfg.empirical_null) {
    log_msg("diagnose: rerunning the pipeline with the Control sample as IP");
    const auto null_core = call_core(control.track, control.track, kernel, cfg, nullptr);
    std::vector<double> null_p;
    null_p.reserve(null_core.peaks.size());
    for (const auto& p : null_core.peaks) null_p.push_back(p.p);
    g_empirical = observed_pvalue_cdf(null_p);
  }

  ensure_dir(cfg.out_dir);
  std::ofstream out(join(cfg.out_dir, "diagnostics.tsv"));
  if (!out) fail(ErrorCode::io, "cannot write diagnostics table");
  out << "p\tG_hat\tG0_hat";
  if (cfg.empirical_null) out << "\tG_empirical_null";
  out << '\n';
  const int n = std::max(2, cfg.p_grid_size);
  for (int i = 0; i < n; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(n - 1);
    out << num(p) << '\t' << num(g_hat.at(p)) << '\t' << num(g0_hat.at(p));
    if (cfg.empirical_null) out << '\t' << num(g_empirical.at(p));
    out << '\n';
  }
  log_msg("diagnose: wrote diagnostics over " + std::to_string(core.peaks.size()) + " candidates");
}

}  // namespace stem
