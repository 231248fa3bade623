#include "shape.hpp"

#include <algorithm>
#include <cmath>

#include "bspline.hpp"

namespace stem {

namespace {

// Integer-grid argmax of a fitted spline over [-h, h], ties to the lower
// offset.
int64_t spline_mode(const std::vector<double>& y, double knot_spacing) {
  const int64_t h = (static_cast<int64_t>(y.size()) - 1) / 2;
  std::vector<double> x(y.size());
  for (size_t i = 0; i < y.size(); ++i) x[i] = static_cast<double>(static_cast<int64_t>(i) - h);
  const auto fit = fit_spline(x, y, knot_spacing);
  int64_t best = -h;
  double best_v = fit(static_cast<double>(-h));
  for (int64_t t = -h + 1; t <= h; ++t) {
    const double v = fit(static_cast<double>(t));
    if (v > best_v) {
      best_v = v;
      best = t;
    }
  }
  return best;
}

bool all_zero(const std::vector<double>& v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

}  // namespace

std::vector<Candidate> preliminary_peaks(const CountTrack& track, const Kernel& prelim_kernel, int n,
                                         bool* short_of_n) {
  if (n <= 0) fail(ErrorCode::invalid, "preliminary peak count must be positive");
  auto cands = local_maxima(convolve(track, prelim_kernel));
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.height != b.height) return a.height > b.height;
    if (a.chrom != b.chrom) return a.chrom < b.chrom;
    return a.pos < b.pos;
  });
  if (short_of_n) *short_of_n = static_cast<int>(cands.size()) < n;
  if (static_cast<int>(cands.size()) > n) cands.resize(static_cast<size_t>(n));
  return cands;
}

StrandProfile strand_profiles(const std::vector<TagRecord>& tags, const std::string& chrom,
                              const std::vector<int64_t>& centers, int64_t window) {
  if (window < 3 || window % 2 == 0)
    fail(ErrorCode::invalid, "profile window must be odd and >= 3, got " + std::to_string(window));
  if (centers.empty()) fail(ErrorCode::invalid, "no peak centers to build strand profiles from");

  // per-strand sorted location lists for the chromosome
  std::vector<int64_t> fwd, rev;
  for (const auto& t : tags) {
    if (t.chrom != chrom) continue;
    (t.strand == Strand::forward ? fwd : rev).push_back(t.location());
  }
  std::sort(fwd.begin(), fwd.end());
  std::sort(rev.begin(), rev.end());

  StrandProfile p;
  p.window = window;
  p.n_peaks = static_cast<int64_t>(centers.size());
  const int64_t h = p.half();
  p.forward.assign(static_cast<size_t>(window), 0.0);
  p.reverse.assign(static_cast<size_t>(window), 0.0);

  for (const int64_t c : centers) {
    auto add = [&](const std::vector<int64_t>& locs, std::vector<double>& prof) {
      auto it = std::lower_bound(locs.begin(), locs.end(), c - h);
      for (; it != locs.end() && *it <= c + h; ++it) prof[static_cast<size_t>(*it - c + h)] += 1.0;
    };
    add(fwd, p.forward);
    add(rev, p.reverse);
  }
  const double inv = 1.0 / static_cast<double>(p.n_peaks);
  for (double& x : p.forward) x *= inv;
  for (double& x : p.reverse) x *= inv;
  return p;
}

int64_t estimate_shift(const StrandProfile& profile, double knot_spacing) {
  if (all_zero(profile.forward) || all_zero(profile.reverse))
    fail(ErrorCode::invalid, "strand profile has an empty strand");
  const int64_t mode_f = spline_mode(profile.forward, knot_spacing);
  const int64_t mode_r = spline_mode(profile.reverse, knot_spacing);
  const int64_t shift = llround(static_cast<double>(mode_r - mode_f) / 2.0);
  if (shift < 0)
    fail(ErrorCode::invalid, "negative estimated shift (" + std::to_string(shift) +
                                 "): strand profiles appear inverted");
  return shift;
}

Kernel estimate_peak_shape(const StrandProfile& profile, int64_t shift, int64_t w_out,
                           double knot_spacing) {
  if (w_out < 3 || w_out % 2 == 0)
    fail(ErrorCode::invalid, "output kernel width must be odd and >= 3, got " + std::to_string(w_out));
  const int64_t h = profile.half();
  const int64_t ho = (w_out - 1) / 2;
  if (shift < 0) fail(ErrorCode::invalid, "shift must be nonnegative");
  const int64_t hv = h - shift;  // aligned profiles are valid on [-hv, hv]
  if (ho > hv)
    fail(ErrorCode::invalid, "output kernel width exceeds the aligned profile range");

  auto at = [](const std::vector<double>& v, int64_t h_, int64_t o) -> double {
    return (o < -h_ || o > h_) ? 0.0 : v[static_cast<size_t>(o + h_)];
  };

  // forward distribution moved toward higher addresses, reverse toward lower
  std::vector<double> sym(static_cast<size_t>(2 * hv + 1));
  for (int64_t o = -hv; o <= hv; ++o) {
    const double a = 0.5 * (at(profile.forward, h, o - shift) + at(profile.reverse, h, o + shift));
    const double m = 0.5 * (at(profile.forward, h, -o - shift) + at(profile.reverse, h, -o + shift));
    sym[static_cast<size_t>(o + hv)] = 0.5 * (a + m);
  }

  std::vector<double> x(sym.size());
  for (size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(static_cast<int64_t>(i) - hv);
  const auto fit = fit_spline(x, sym, knot_spacing);

  const auto window = quartic_biweight(w_out);
  std::vector<double> w(static_cast<size_t>(w_out));
  for (int64_t o = -ho; o <= ho; ++o)
    w[static_cast<size_t>(o + ho)] =
        std::max(0.0, fit(static_cast<double>(o))) * window[static_cast<size_t>(o + ho)];

  // exact symmetry, then unit sum
  for (int64_t o = 1; o <= ho; ++o) {
    const double m = 0.5 * (w[static_cast<size_t>(ho + o)] + w[static_cast<size_t>(ho - o)]);
    w[static_cast<size_t>(ho + o)] = m;
    w[static_cast<size_t>(ho - o)] = m;
  }
  double s = 0.0;
  for (double v : w) s += v;
  if (!(s > 0.0)) fail(ErrorCode::numeric, "estimated peak shape is all zero");
  for (double& v : w) v /= s;

  // reject multimodal estimates: exactly one interior maximum, at the
  // center. Spline ripples in near-zero tails are not modes; anything
  // below 0.1% of the mode weight is ignored.
  int n_max = 0;
  bool center_is_max = false;
  {
    const size_t n = w.size();
    const double floor = w[static_cast<size_t>(ho)] * 1e-3;
    double prev = -1.0;
    size_t i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n && w[j + 1] == w[i]) ++j;
      const double next = j + 1 < n ? w[j + 1] : -1.0;
      if (w[i] > prev && w[i] > next && w[i] >= floor) {
        ++n_max;
        if (i <= static_cast<size_t>(ho) && static_cast<size_t>(ho) <= j) center_is_max = true;
      }
      prev = w[i];
      i = j + 1;
    }
  }
  if (n_max != 1 || !center_is_max)
    fail(ErrorCode::numeric, "estimated peak shape is not unimodal with a central mode");

  Kernel k{std::move(w)};
  k.validate();
  return k;
}

}  // namespace stem
