#include "multitest.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rng.hpp"

namespace stem {

std::vector<char> bh_select(const std::vector<double>& pvalues, double q) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::invalid, "FDR level must be in (0, 1)");
  std::vector<char> flags(pvalues.size(), 0);
  if (pvalues.empty()) return flags;

  std::vector<double> sorted(pvalues);
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double threshold = -1.0;
  for (size_t k = sorted.size(); k >= 1; --k) {
    if (sorted[k - 1] <= static_cast<double>(k) * q / m) {
      threshold = sorted[k - 1];
      break;
    }
  }
  if (threshold < 0.0) return flags;
  for (size_t i = 0; i < pvalues.size(); ++i) flags[i] = pvalues[i] <= threshold ? 1 : 0;
  return flags;
}

void bh_mark(std::vector<Peak>& peaks, double q) {
  std::vector<double> p(peaks.size());
  for (size_t i = 0; i < peaks.size(); ++i) p[i] = peaks[i].p;
  const auto flags = bh_select(p, q);
  for (size_t i = 0; i < peaks.size(); ++i) peaks[i].significant = flags[i] != 0;
}

void rank_peaks(std::vector<Peak>& peaks) {
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.significant != b.significant) return a.significant;
    if (a.below_resolution != b.below_resolution) return a.below_resolution;
    if (a.below_resolution) {
      if (a.snr != b.snr) return a.snr > b.snr;
    } else {
      if (a.p != b.p) return a.p < b.p;
      if (a.snr != b.snr) return a.snr > b.snr;
    }
    if (a.chrom != b.chrom) return a.chrom < b.chrom;
    return a.pos < b.pos;
  });
  for (size_t i = 0; i < peaks.size(); ++i) peaks[i].rank = static_cast<int64_t>(i) + 1;
}

double StepCDF::at(double x) const {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  return it == xs.begin() ? 0.0 : ys[static_cast<size_t>(it - xs.begin()) - 1];
}

double StepCDF::before(double x) const {
  const auto it = std::lower_bound(xs.begin(), xs.end(), x);
  return it == xs.begin() ? 0.0 : ys[static_cast<size_t>(it - xs.begin()) - 1];
}

double ks_distance(const StepCDF& a, const StepCDF& b) {
  double d = 0.0;
  for (const auto* f : {&a, &b})
    for (double x : f->xs) {
      d = std::max(d, std::fabs(a.at(x) - b.at(x)));
      d = std::max(d, std::fabs(a.before(x) - b.before(x)));
    }
  return d;
}

StepCDF observed_pvalue_cdf(std::vector<double> pvalues) {
  StepCDF cdf;
  std::sort(pvalues.begin(), pvalues.end());
  const double inv = pvalues.empty() ? 0.0 : 1.0 / static_cast<double>(pvalues.size());
  for (size_t i = 0; i < pvalues.size();) {
    size_t j = i;
    while (j + 1 < pvalues.size() && pvalues[j + 1] == pvalues[i]) ++j;
    cdf.xs.push_back(pvalues[i]);
    cdf.ys.push_back(static_cast<double>(j + 1) * inv);
    i = j + 1;
  }
  return cdf;
}

StepCDF null_pvalue_cdf(double lambda, const SurvivalTable& table, const Kernel& kernel,
                        int64_t sim_length) {
  const int j = nearest_lambda_index(table, lambda);
  const double grid_lambda = table.lambda_grid[static_cast<size_t>(j)];
  const auto heights =
      simulate_heights(grid_lambda, kernel, derive_seed(table.seed, kStreamNullCdf, static_cast<uint64_t>(j)),
                       std::max(sim_length, table.sim_min_length), table.sim_min_nonzero);

  // The null p-value of an attainable height u_k is its own survival
  // probability, so G0 steps through the empirical survival levels of the
  // simulated multiset: each level is its own cumulative probability. This
  // keeps G0(p) <= p exactly and preserves the atom at p = 1 from isolated
  // single tags.
  const double n = static_cast<double>(heights.size());
  std::vector<double> levels;  // ascending; heights descend as levels ascend
  for (size_t i = 0; i < heights.size();) {
    size_t k = i;
    while (k + 1 < heights.size() && heights[k + 1] == heights[i]) ++k;
    levels.push_back(static_cast<double>(heights.size() - i) / n);
    i = k + 1;
  }
  std::sort(levels.begin(), levels.end());

  StepCDF cdf;
  cdf.xs = levels;
  cdf.ys = std::move(levels);
  return cdf;
}

double MixtureCDF::at(double p) const {
  double s = 0.0;
  for (const auto& [w, cdf] : parts) s += w * cdf.at(p);
  return s;
}

MixtureCDF null_mixture_cdf(const std::vector<double>& lambda0_plus, const SurvivalTable& table,
                            const Kernel& kernel, int64_t sim_length) {
  MixtureCDF mix;
  if (lambda0_plus.empty()) return mix;
  std::map<int, int64_t> counts;
  for (double lam : lambda0_plus) ++counts[nearest_lambda_index(table, lam)];
  const double inv = 1.0 / static_cast<double>(lambda0_plus.size());
  for (const auto& [j, n] : counts) {
    const double lam = table.lambda_grid[static_cast<size_t>(j)];
    mix.parts.emplace_back(static_cast<double>(n) * inv,
                           null_pvalue_cdf(lam, table, kernel, sim_length));
  }
  return mix;
}

}  // namespace stem
