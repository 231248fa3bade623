#include "background.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace stem {

double window_average(const CountTrack& track, const std::string& chrom, int64_t center, int64_t width) {
  if (width < 1) fail(ErrorCode::invalid, "window width must be >= 1");
  const int64_t len = track.length_of(chrom);
  // exactly `width` positions centered at `center`; the clipped position
  // count replaces the width as denominator at chromosome ends
  int64_t lo = center - width / 2, hi = center - width / 2 + width - 1;
  int64_t denom = width;
  if (lo < 0 || hi >= len) {
    lo = std::max<int64_t>(lo, 0);
    hi = std::min<int64_t>(hi, len - 1);
    if (hi < lo) return 0.0;
    denom = hi - lo + 1;
  }
  const auto it = track.chroms.find(chrom);
  if (it == track.chroms.end()) return 0.0;
  return static_cast<double>(it->second.window_sum(lo, hi)) / static_cast<double>(denom);
}

BackgroundModel fit_background_regression(const CountTrack& ip, const CountTrack& control,
                                          int64_t window_small, int64_t window_large,
                                          std::vector<BinRow>* dump) {
  if (window_small < 1 || window_large <= window_small)
    fail(ErrorCode::invalid, "background windows must satisfy 1 <= small < large");
  if (ip.empty() || control.empty())
    fail(ErrorCode::invalid, "background regression needs nonempty IP and Control tracks");

  // normal equations accumulated over every 1 Kb bin; all-zero bins
  // contribute nothing except degrees of freedom
  double sxx = 0, sxz = 0, szz = 0, sxy = 0, szy = 0, syy = 0;
  int64_t n_bins = 0;

  std::set<std::string> chroms;
  for (const auto& [c, _] : ip.chroms) chroms.insert(c);
  for (const auto& [c, _] : control.chroms) chroms.insert(c);

  for (const auto& chrom : chroms) {
    const auto* ipc = ip.chroms.count(chrom) ? &ip.chroms.at(chrom) : nullptr;
    const auto* cc = control.chroms.count(chrom) ? &control.chroms.at(chrom) : nullptr;
    int64_t len = ip.length_of(chrom);
    if (len == kUnknownLength) len = control.length_of(chrom);
    if (len == kUnknownLength) {
      int64_t m = -1;
      if (ipc) m = std::max(m, ipc->max_pos());
      if (cc) m = std::max(m, cc->max_pos());
      len = m + 1;
    }
    if (len <= 0) continue;
    n_bins += (len + window_small - 1) / window_small;

    // walk the large bins that have any coverage in either track
    const int64_t n_large = (len + window_large - 1) / window_large;
    const int64_t per_large = window_large / window_small;
    std::set<int64_t> active;
    if (ipc)
      for (int64_t p : ipc->pos) active.insert(p / window_large);
    if (cc)
      for (int64_t p : cc->pos) active.insert(p / window_large);
    for (const int64_t big : active) {
      if (big >= n_large) continue;
      const int64_t big_lo = big * window_large;
      const int64_t big_hi = std::min(len, big_lo + window_large) - 1;
      const double c10 = cc ? static_cast<double>(cc->window_sum(big_lo, big_hi)) /
                                  static_cast<double>(big_hi - big_lo + 1)
                            : 0.0;
      for (int64_t k = 0; k < per_large; ++k) {
        const int64_t lo = big_lo + k * window_small;
        if (lo >= len) break;
        const int64_t hi = std::min(len, lo + window_small) - 1;
        const double bw = static_cast<double>(hi - lo + 1);
        const double y = ipc ? static_cast<double>(ipc->window_sum(lo, hi)) / bw : 0.0;
        const double x = cc ? static_cast<double>(cc->window_sum(lo, hi)) / bw : 0.0;
        const double z = c10;
        sxx += x * x;
        sxz += x * z;
        szz += z * z;
        sxy += x * y;
        szy += z * y;
        syy += y * y;
        if (dump && (x != 0.0 || z != 0.0 || y != 0.0))
          dump->push_back(BinRow{chrom, lo, y, x, z});
      }
    }
  }

  const double det = sxx * szz - sxz * sxz;
  const double scale = std::max(sxx, szz);
  if (!(det > 1e-14 * scale * scale) || scale == 0.0)
    fail(ErrorCode::numeric, "background regression design is singular (Control coverage too thin)");

  BackgroundModel m;
  m.window_small = window_small;
  m.window_large = window_large;
  m.a1 = (sxy * szz - szy * sxz) / det;
  m.a2 = (szy * sxx - sxy * sxz) / det;

  const double rss = std::max(0.0, syy - m.a1 * sxy - m.a2 * szy);
  const double dof = static_cast<double>(std::max<int64_t>(n_bins - 2, 1));
  const double s2 = rss / dof;
  m.a1_se = std::sqrt(s2 * szz / det);
  m.a2_se = std::sqrt(s2 * sxx / det);
  return m;
}

double global_rate(const CountTrack& ip, double genome_length) {
  if (!(genome_length > 0.0)) fail(ErrorCode::invalid, "genome length must be positive");
  return static_cast<double>(ip.total_count()) / genome_length;
}

std::pair<double, double> background_at(const BackgroundModel& model, const CountTrack& control,
                                        const std::string& chrom, int64_t t) {
  const double lam0 =
      std::max(0.0, model.a1 * window_average(control, chrom, t, model.window_small) +
                        model.a2 * window_average(control, chrom, t, model.window_large));
  return {lam0, std::max(lam0, model.lambda_L)};
}

}  // namespace stem
