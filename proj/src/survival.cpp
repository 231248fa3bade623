#include "survival.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bspline.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "smooth.hpp"

namespace stem {

namespace {

// Nonincreasing isotonic regression (pool adjacent violators).
void pava_nonincreasing(std::vector<double>& y) {
  const size_t n = y.size();
  std::vector<double> level(n), weight(n);
  std::vector<size_t> count(n);
  size_t m = 0;
  for (size_t i = 0; i < n; ++i) {
    level[m] = y[i];
    weight[m] = 1.0;
    count[m] = 1;
    ++m;
    while (m > 1 && level[m - 2] < level[m - 1]) {
      const double w = weight[m - 2] + weight[m - 1];
      level[m - 2] = (level[m - 2] * weight[m - 2] + level[m - 1] * weight[m - 1]) / w;
      weight[m - 2] = w;
      count[m - 2] += count[m - 1];
      --m;
    }
  }
  size_t i = 0;
  for (size_t b = 0; b < m; ++b)
    for (size_t k = 0; k < count[b]; ++k) y[i++] = level[b];
}

}  // namespace

std::vector<double> simulate_heights(double lambda, const Kernel& kernel, uint64_t seed,
                                     int64_t min_length, int64_t min_nonzero) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid, "simulation rate must be positive");
  Rng rng(seed);
  const double exp_neg = std::exp(-lambda);
  const int64_t block =
      std::max<int64_t>(min_length, static_cast<int64_t>(std::ceil(static_cast<double>(min_nonzero) / lambda)));

  ChromCounts cc;
  int64_t length = 0;
  int iter = 0;
  while (static_cast<int64_t>(cc.pos.size()) < min_nonzero) {
    if (++iter > 1000) fail(ErrorCode::numeric, "simulation failed to reach the nonzero-count target");
    const int64_t end = length + block;
    for (int64_t t = length; t < end; ++t) {
      const int64_t c = rng.poisson_pre(lambda, exp_neg);
      if (c > 0) {
        cc.pos.push_back(t);
        cc.count.push_back(static_cast<int32_t>(c));
      }
    }
    length = end;
  }
  cc.finalize();

  CountTrack track;
  track.lengths["sim"] = length;
  track.chroms.emplace("sim", std::move(cc));

  auto cands = local_maxima(convolve(track, kernel));
  std::vector<double> heights;
  heights.reserve(cands.size());
  for (const auto& c : cands) heights.push_back(c.height);
  std::sort(heights.begin(), heights.end());
  return heights;
}

SurvivalTable build_table(double data_lambda_min, double data_lambda_max, const Kernel& kernel,
                          uint64_t seed, const TableOptions& opt) {
  kernel.validate();
  if (!(data_lambda_min > 0.0) || !(data_lambda_max >= data_lambda_min))
    fail(ErrorCode::invalid, "degenerate lambda range for survival table");
  if (opt.n_lambda < 2 || opt.n_u < 2) fail(ErrorCode::invalid, "survival table grid too small");

  SurvivalTable t;
  t.kernel_fp = kernel.fingerprint();
  t.seed = seed;
  t.sim_min_length = opt.sim_min_length;
  t.sim_min_nonzero = opt.sim_min_nonzero;
  t.data_lambda_min = data_lambda_min;
  t.data_lambda_max = data_lambda_max;
  t.margin = opt.margin;

  const double lo = data_lambda_min * (1.0 - opt.margin);
  const double hi = data_lambda_max * (1.0 + opt.margin);
  if (!(lo > 0.0 && hi > lo)) fail(ErrorCode::invalid, "degenerate lambda range after margin");

  const int nl = opt.n_lambda;
  t.lambda_grid.resize(static_cast<size_t>(nl));
  const double xlo = std::log(lo), xhi = std::log(hi);
  for (int j = 0; j < nl; ++j)
    t.lambda_grid[static_cast<size_t>(j)] =
        std::exp(xlo + (xhi - xlo) * static_cast<double>(j) / static_cast<double>(nl - 1));
  t.lambda_grid.front() = lo;
  t.lambda_grid.back() = hi;

  // per-lambda height multisets, simulated independently with derived seeds
  std::vector<std::vector<double>> heights(static_cast<size_t>(nl));
  parallel_for(nl, opt.threads, [&](int64_t j) {
    heights[static_cast<size_t>(j)] =
        simulate_heights(t.lambda_grid[static_cast<size_t>(j)], kernel,
                         derive_seed(seed, kStreamTable, static_cast<uint64_t>(j)),
                         opt.sim_min_length, opt.sim_min_nonzero);
  });

  t.n_maxima.resize(static_cast<size_t>(nl));
  double u_max = 0.0;
  for (int j = 0; j < nl; ++j) {
    const auto& h = heights[static_cast<size_t>(j)];
    if (h.empty()) fail(ErrorCode::numeric, "simulation produced no local maxima");
    t.n_maxima[static_cast<size_t>(j)] = static_cast<int64_t>(h.size());
    u_max = std::max(u_max, h.back());
  }

  const double u0 = kernel.mode_weight();
  if (!(u_max > u0)) u_max = 2.0 * u0;  // essentially impossible except at absurdly small ranges
  const int nu = opt.n_u;
  t.u_grid.resize(static_cast<size_t>(nu));
  const double ylo = std::log(u0), yhi = std::log(u_max);
  for (int k = 0; k < nu; ++k)
    t.u_grid[static_cast<size_t>(k)] =
        std::exp(ylo + (yhi - ylo) * static_cast<double>(k) / static_cast<double>(nu - 1));
  t.u_grid.front() = u0;
  t.u_grid.back() = u_max;

  // raw per-lambda empirical survival on the shared u grid
  t.F.assign(static_cast<size_t>(nl), std::vector<double>(static_cast<size_t>(nu), 0.0));
  for (int j = 0; j < nl; ++j) {
    const auto& h = heights[static_cast<size_t>(j)];
    const double inv = 1.0 / static_cast<double>(h.size());
    for (int k = 0; k < nu; ++k) {
      const auto it = std::lower_bound(h.begin(), h.end(), t.u_grid[static_cast<size_t>(k)]);
      t.F[static_cast<size_t>(j)][static_cast<size_t>(k)] =
          static_cast<double>(h.end() - it) * inv;
    }
  }

  // smooth across lambda for each fixed u (least squares on 5 B-spline basis
  // functions in log lambda), clamp, anchor the single-tag column, and
  // restore monotonicity in u
  std::vector<double> xs(static_cast<size_t>(nl));
  for (int j = 0; j < nl; ++j) xs[static_cast<size_t>(j)] = std::log(t.lambda_grid[static_cast<size_t>(j)]);
  BSplineSmoother smoother(xs, 5);
  std::vector<double> col(static_cast<size_t>(nl));
  for (int k = 0; k < nu; ++k) {
    for (int j = 0; j < nl; ++j) col[static_cast<size_t>(j)] = t.F[static_cast<size_t>(j)][static_cast<size_t>(k)];
    const auto sm = smoother.smooth(col);
    for (int j = 0; j < nl; ++j)
      t.F[static_cast<size_t>(j)][static_cast<size_t>(k)] = std::clamp(sm[static_cast<size_t>(j)], 0.0, 1.0);
  }
  for (int j = 0; j < nl; ++j) {
    t.F[static_cast<size_t>(j)][0] = 1.0;
    pava_nonincreasing(t.F[static_cast<size_t>(j)]);
  }
  return t;
}

int nearest_lambda_index(const SurvivalTable& t, double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid, "lambda must be positive");
  const double x = std::log(lambda);
  int best = 0;
  double bestd = std::fabs(std::log(t.lambda_grid.front()) - x);
  for (size_t j = 1; j < t.lambda_grid.size(); ++j) {
    const double d = std::fabs(std::log(t.lambda_grid[j]) - x);
    if (d < bestd) {
      bestd = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

PValue lookup(const SurvivalTable& t, double u, double lambda) {
  if (lambda < t.lambda_min() || lambda > t.lambda_max())
    fail(ErrorCode::state, "lambda " + std::to_string(lambda) +
                               " outside survival table range [" + std::to_string(t.lambda_min()) +
                               ", " + std::to_string(t.lambda_max()) + "]; rebuild the table for this data");

  const size_t nl = t.lambda_grid.size();
  size_t j = static_cast<size_t>(std::upper_bound(t.lambda_grid.begin(), t.lambda_grid.end(), lambda) -
                                 t.lambda_grid.begin());
  j = j == 0 ? 0 : j - 1;
  if (j > nl - 2) j = nl - 2;
  const double x0 = std::log(t.lambda_grid[j]), x1 = std::log(t.lambda_grid[j + 1]);
  const double s = (std::log(lambda) - x0) / (x1 - x0);

  PValue out;
  if (u < t.u_grid.front()) {
    out.p = 1.0;
    return out;
  }
  if (u > t.u_grid.back()) {
    out.p = 0.0;
    out.below_resolution = true;
    return out;
  }

  const size_t nu = t.u_grid.size();
  size_t k = static_cast<size_t>(std::upper_bound(t.u_grid.begin(), t.u_grid.end(), u) - t.u_grid.begin());
  k = k == 0 ? 0 : k - 1;
  if (k > nu - 2) k = nu - 2;
  const double tt = (u - t.u_grid[k]) / (t.u_grid[k + 1] - t.u_grid[k]);

  const auto interp_u = [tt](double a, double b) { return a == b ? a : a + tt * (b - a); };
  const double pa = interp_u(t.F[j][k], t.F[j][k + 1]);
  const double pb = interp_u(t.F[j + 1][k], t.F[j + 1][k + 1]);
  out.p = std::clamp(pa == pb ? pa : pa + s * (pb - pa), 0.0, 1.0);

  const int64_t n_near = t.n_maxima[s < 0.5 ? j : j + 1];
  if (out.p < 1.0 / static_cast<double>(n_near)) out.below_resolution = true;
  return out;
}

void write_table(const std::string& path, const SurvivalTable& t) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write survival table: " + path);
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  out << "#stem-survival-table v1\n";
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(t.kernel_fp));
  out << "#kernel_fingerprint " << buf << "\n";
  out << "#seed " << t.seed << "\n";
  out << "#sim_min_length " << t.sim_min_length << "\n";
  out << "#sim_min_nonzero " << t.sim_min_nonzero << "\n";
  out << "#data_lambda_min ";
  put(t.data_lambda_min);
  out << "\n#data_lambda_max ";
  put(t.data_lambda_max);
  out << "\n#margin ";
  put(t.margin);
  out << "\n#n_lambda " << t.lambda_grid.size() << "\n";
  out << "#n_u " << t.u_grid.size() << "\n";
  out << "#lambda";
  for (double v : t.lambda_grid) {
    out << ' ';
    put(v);
  }
  out << "\n#u";
  for (double v : t.u_grid) {
    out << ' ';
    put(v);
  }
  out << "\n#n_maxima";
  for (int64_t v : t.n_maxima) out << ' ' << v;
  out << "\n";
  for (const auto& row : t.F) {
    for (size_t k = 0; k < row.size(); ++k) {
      if (k) out << ' ';
      put(row[k]);
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::io, "error writing survival table: " + path);
}

SurvivalTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open survival table: " + path);
  SurvivalTable t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("#stem-survival-table v1", 0) != 0)
    fail(ErrorCode::parse, path + ": not a stem survival table (bad magic line)");
  size_t nl = 0, nu = 0;
  while (in.peek() == '#') {
    std::getline(in, line);
    std::istringstream ss(line.substr(1));
    std::string key;
    ss >> key;
    if (key == "kernel_fingerprint") {
      std::string hex;
      ss >> hex;
      t.kernel_fp = std::stoull(hex, nullptr, 16);
    } else if (key == "seed")
      ss >> t.seed;
    else if (key == "sim_min_length")
      ss >> t.sim_min_length;
    else if (key == "sim_min_nonzero")
      ss >> t.sim_min_nonzero;
    else if (key == "data_lambda_min")
      ss >> t.data_lambda_min;
    else if (key == "data_lambda_max")
      ss >> t.data_lambda_max;
    else if (key == "margin")
      ss >> t.margin;
    else if (key == "n_lambda")
      ss >> nl;
    else if (key == "n_u")
      ss >> nu;
    else if (key == "lambda") {
      double v;
      while (ss >> v) t.lambda_grid.push_back(v);
    } else if (key == "u") {
      double v;
      while (ss >> v) t.u_grid.push_back(v);
    } else if (key == "n_maxima") {
      int64_t v;
      while (ss >> v) t.n_maxima.push_back(v);
    }
    // unknown header keys are ignored for forward compatibility
  }
  if (nl == 0 || nu == 0 || t.lambda_grid.size() != nl || t.u_grid.size() != nu ||
      t.n_maxima.size() != nl)
    fail(ErrorCode::parse, path + ": inconsistent survival table header");
  t.F.assign(nl, std::vector<double>(nu, 0.0));
  for (size_t j = 0; j < nl; ++j) {
    if (!std::getline(in, line)) fail(ErrorCode::parse, path + ": truncated survival table");
    std::istringstream ss(line);
    for (size_t k = 0; k < nu; ++k)
      if (!(ss >> t.F[j][k])) fail(ErrorCode::parse, path + ": short survival table row");
  }
  return t;
}

}  // namespace stem
