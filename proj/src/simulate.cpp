#include "simulate.hpp"

#include <algorithm>
#include <cmath>

namespace stem {

double RateTrack::mean() const {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

CountTrack synth_template(const SpikeInConfig& cfg, Rng& rng) {
  if (cfg.length <= 0) fail(ErrorCode::invalid, "template length must be positive");
  if (cfg.template_block <= 0) fail(ErrorCode::invalid, "template block must be positive");

  RateTrack rates;
  rates.v.resize(static_cast<size_t>(cfg.length));
  for (int64_t lo = 0; lo < cfg.length; lo += cfg.template_block) {
    const double r = cfg.template_base_rate + rng.lognormal(cfg.template_median, cfg.template_sigma);
    const int64_t hi = std::min(cfg.length, lo + cfg.template_block);
    for (int64_t t = lo; t < hi; ++t) rates.v[static_cast<size_t>(t)] = r;
  }
  return sample_track(rates, rng, "sim");
}

SynthRates synth_rates(const CountTrack& control_template, const SpikeInConfig& cfg) {
  const int64_t L = cfg.length;
  if (L <= 0) fail(ErrorCode::invalid, "simulation length must be positive");
  const auto it = control_template.chroms.begin();
  if (it == control_template.chroms.end())
    fail(ErrorCode::invalid, "template track has no chromosomes");
  const ChromCounts& cc = it->second;
  int64_t tmpl_len = control_template.length_of(it->first);
  if (tmpl_len == kUnknownLength) tmpl_len = cc.max_pos() + 1;
  if (tmpl_len < L)
    fail(ErrorCode::invalid, "template track shorter than the simulation length");

  SynthRates out;
  out.lambda_c.v.resize(static_cast<size_t>(L));
  out.lambda_0.v.resize(static_cast<size_t>(L));

  // sliding window sums over the dense template; windows follow the same
  // centered/clipped convention as background estimation
  std::vector<int32_t> dense(static_cast<size_t>(L), 0);
  for (size_t i = 0; i < cc.pos.size(); ++i)
    if (cc.pos[i] < L) dense[static_cast<size_t>(cc.pos[i])] = cc.count[i];
  std::vector<int64_t> cum(static_cast<size_t>(L) + 1, 0);
  for (int64_t t = 0; t < L; ++t) cum[static_cast<size_t>(t) + 1] = cum[static_cast<size_t>(t)] + dense[static_cast<size_t>(t)];

  auto win_avg = [&](int64_t t, int64_t w) {
    int64_t lo = t - w / 2, hi = t - w / 2 + w - 1;
    int64_t denom = w;
    if (lo < 0 || hi >= L) {
      lo = std::max<int64_t>(lo, 0);
      hi = std::min<int64_t>(hi, L - 1);
      denom = hi - lo + 1;
    }
    return static_cast<double>(cum[static_cast<size_t>(hi) + 1] - cum[static_cast<size_t>(lo)]) /
           static_cast<double>(denom);
  };

  bool any = false;
  for (int64_t t = 0; t < L; ++t) {
    const double lc = cfg.synth_a1 * win_avg(t, cfg.window_small) + cfg.synth_a2 * win_avg(t, cfg.window_large);
    out.lambda_c.v[static_cast<size_t>(t)] = lc;
    out.lambda_0.v[static_cast<size_t>(t)] = cfg.control_to_ip * lc;
    any = any || lc > 0.0;
  }
  if (!any) fail(ErrorCode::invalid, "template track is all zero; rates are degenerate");
  return out;
}

SpikeResult place_spikes(const RateTrack& lambda0, const Kernel& shape, const SpikeInConfig& cfg,
                         Rng& rng) {
  const int64_t L = lambda0.length();
  const int64_t half = shape.half();
  const int64_t W = shape.width();
  if (static_cast<int64_t>(cfg.n_spikes) * W >= L)
    fail(ErrorCode::invalid, "spike supports cannot fit disjointly in the simulated length");

  SpikeResult out;
  out.truth.support_half = half;
  out.lambda_ip.v = lambda0.v;

  const int64_t lo = half, hi = L - half - 1;
  std::vector<int64_t> centers;
  int64_t attempts = 0;
  const int64_t max_attempts = 10000LL * std::max(cfg.n_spikes, 1);
  while (static_cast<int>(centers.size()) < cfg.n_spikes) {
    if (++attempts > max_attempts)
      fail(ErrorCode::numeric, "could not place disjoint spike supports");
    const int64_t c = lo + rng.uniform_below(hi - lo + 1);
    bool ok = true;
    for (int64_t prev : centers)
      if (std::llabs(prev - c) < W) {
        ok = false;
        break;
      }
    if (ok) centers.push_back(c);
  }
  std::sort(centers.begin(), centers.end());
  out.truth.centers = centers;

  // amplitude: matched-filter response at a spike center equals mean(lambda0)
  const double amp = lambda0.mean() / shape.sum_sq();
  for (int64_t c : centers)
    for (int64_t o = -half; o <= half; ++o)
      out.lambda_ip.v[static_cast<size_t>(c + o)] += cfg.snr * amp * shape.at(o);
  return out;
}

CountTrack sample_track(const RateTrack& rates, Rng& rng, const std::string& chrom) {
  CountTrack track;
  track.lengths[chrom] = rates.length();
  ChromCounts cc;
  for (int64_t t = 0; t < rates.length(); ++t) {
    const double lam = rates.v[static_cast<size_t>(t)];
    if (lam < 0.0) fail(ErrorCode::invalid, "negative rate at position " + std::to_string(t));
    const int64_t c = rng.poisson(lam);
    if (c > 0) {
      cc.pos.push_back(t);
      cc.count.push_back(static_cast<int32_t>(c));
    }
  }
  cc.finalize();
  track.chroms.emplace(chrom, std::move(cc));
  return track;
}

Score score_detections(const std::vector<Peak>& detected, const GroundTruth& truth) {
  Score s;
  s.n_spikes = static_cast<int>(truth.centers.size());
  std::vector<char> hit(truth.centers.size(), 0);
  for (const auto& pk : detected) {
    ++s.detections;
    bool inside = false;
    if (pk.chrom == truth.chrom && !truth.centers.empty()) {
      const auto it = std::lower_bound(truth.centers.begin(), truth.centers.end(), pk.pos);
      for (const auto cand : {it, it == truth.centers.begin() ? it : it - 1}) {
        if (cand == truth.centers.end()) continue;
        if (std::llabs(*cand - pk.pos) <= truth.support_half) {
          inside = true;
          hit[static_cast<size_t>(cand - truth.centers.begin())] = 1;
        }
      }
    }
    if (inside)
      ++s.true_detections;
    else
      ++s.false_detections;
  }
  for (char h : hit) s.spikes_recovered += h;
  s.fdp = static_cast<double>(s.false_detections) /
          static_cast<double>(std::max<int64_t>(1, s.detections));
  s.power = truth.centers.empty()
                ? 0.0
                : static_cast<double>(s.spikes_recovered) / static_cast<double>(truth.centers.size());
  return s;
}

}  // namespace stem
