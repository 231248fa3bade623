#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "oracles.hpp"
#include "rng.hpp"
#include "survival.hpp"

using namespace stem;

namespace {

SurvivalTable hand_table() {
  // bilinear surface in (log lambda, u), decreasing in u
  SurvivalTable t;
  t.lambda_grid = {0.01, 0.04};
  t.u_grid = {0.1, 0.2, 0.4};
  t.n_maxima = {100000, 100000};
  t.F.assign(2, std::vector<double>(3));
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 3; ++k)
      t.F[static_cast<size_t>(j)][static_cast<size_t>(k)] =
          0.9 - 0.5 * t.u_grid[static_cast<size_t>(k)] +
          0.05 * (std::log(t.lambda_grid[static_cast<size_t>(j)]) - std::log(0.01));
  return t;
}

}  // namespace

TEST_CASE("simulate_heights: isolated counts give exactly the mode weight") {
  const auto kernel = biweight_kernel(101);
  const auto h = simulate_heights(1e-5, kernel, 99, 100000, 100);
  REQUIRE(h.size() >= 100);
  for (double v : h) CHECK(v == kernel.mode_weight());
}

TEST_CASE("simulate_heights is deterministic given the seed") {
  const auto kernel = synthetic_peak_shape(201, 40.0);
  const auto a = simulate_heights(0.02, kernel, 1234, 50000, 100);
  const auto b = simulate_heights(0.02, kernel, 1234, 50000, 100);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  const auto c = simulate_heights(0.02, kernel, 1235, 50000, 100);
  CHECK(a != c);
}

TEST_CASE("re-simulation with a different seed agrees within KS 0.02") {
  const auto kernel = synthetic_peak_shape(801);
  const auto a = simulate_heights(0.01, kernel, 7, 2000000, 100);
  const auto b = simulate_heights(0.01, kernel, 8, 2000000, 100);
  CHECK(oracle::two_sample_ks(a, b) <= 0.02);
}

TEST_CASE("build_table grid construction") {
  const auto kernel = synthetic_peak_shape(201, 40.0);
  TableOptions opt;
  opt.n_lambda = 30;
  opt.n_u = 50;
  opt.sim_min_length = 20000;
  opt.sim_min_nonzero = 50;
  // the published data range: margin widens [0.00118, 0.0740] to
  // [0.000885, 0.0925]
  const auto t = build_table(0.00118, 0.0740, kernel, 42, opt);
  CHECK(t.lambda_min() == doctest::Approx(0.000885).epsilon(1e-12));
  CHECK(t.lambda_max() == doctest::Approx(0.0925).epsilon(1e-12));
  CHECK(t.lambda_grid.size() == 30);
  CHECK(t.u_grid.size() == 50);
  CHECK(t.u_grid.front() == kernel.mode_weight());
  // log-equal spacing
  const double r0 = t.lambda_grid[1] / t.lambda_grid[0];
  const double r1 = t.lambda_grid[15] / t.lambda_grid[14];
  CHECK(r0 == doctest::Approx(r1).epsilon(1e-9));

  SUBCASE("columns are monotone, values in [0,1], single-tag column anchored") {
    for (const auto& row : t.F) {
      CHECK(row.front() == 1.0);
      for (size_t k = 0; k < row.size(); ++k) {
        CHECK(row[k] >= 0.0);
        CHECK(row[k] <= 1.0);
        if (k) CHECK(row[k] <= row[k - 1]);
      }
    }
  }
  SUBCASE("degenerate ranges are rejected") {
    CHECK_THROWS_AS(build_table(0.0, 0.1, kernel, 42, opt), Error);
    CHECK_THROWS_AS(build_table(0.1, 0.05, kernel, 42, opt), Error);
  }
}

TEST_CASE("build_table is deterministic and thread-count independent") {
  const auto kernel = synthetic_peak_shape(201, 40.0);
  TableOptions opt;
  opt.n_lambda = 12;
  opt.n_u = 30;
  opt.sim_min_length = 20000;
  opt.sim_min_nonzero = 50;
  opt.threads = 1;
  const auto a = build_table(0.01, 0.05, kernel, 9, opt);
  opt.threads = 4;
  const auto b = build_table(0.01, 0.05, kernel, 9, opt);
  REQUIRE(a.F.size() == b.F.size());
  for (size_t j = 0; j < a.F.size(); ++j)
    for (size_t k = 0; k < a.F[j].size(); ++k) CHECK(a.F[j][k] == b.F[j][k]);
  for (size_t j = 0; j < a.lambda_grid.size(); ++j) CHECK(a.lambda_grid[j] == b.lambda_grid[j]);
}

TEST_CASE("small-kernel table matches a long-run dense oracle") {
  const auto kernel = make_kernel({0.25, 0.5, 0.25});
  TableOptions opt;
  opt.n_lambda = 40;
  opt.n_u = 60;
  opt.sim_min_length = 200000;
  const auto t = build_table(0.05, 0.1, kernel, 314, opt);

  Rng rng(2718);
  for (const double lam : {0.05, 0.1}) {
    const int64_t n = 10000000;
    const double exp_neg = std::exp(-lam);
    std::vector<double> dense(static_cast<size_t>(n), 0.0);
    for (auto& v : dense) v = static_cast<double>(rng.poisson_pre(lam, exp_neg));
    const auto sm = oracle::dense_convolve(dense, kernel);
    const auto maxima = oracle::naive_local_maxima(sm);
    std::vector<double> heights;
    heights.reserve(maxima.size());
    for (int64_t i : maxima) heights.push_back(sm[static_cast<size_t>(i)]);
    std::sort(heights.begin(), heights.end());

    const double inv = 1.0 / static_cast<double>(heights.size());
    for (size_t k = 1; k < t.u_grid.size(); k += 7) {
      const double u = t.u_grid[k];
      const auto it = std::lower_bound(heights.begin(), heights.end(), u);
      const double oracle_surv = static_cast<double>(heights.end() - it) * inv;
      CHECK(std::fabs(lookup(t, u, lam).p - oracle_surv) <= 0.02);
    }
  }
}

TEST_CASE("lookup") {
  const auto t = hand_table();

  SUBCASE("values at grid nodes are the stored values") {
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 3; ++k)
        CHECK(lookup(t, t.u_grid[static_cast<size_t>(k)], t.lambda_grid[static_cast<size_t>(j)]).p ==
              t.F[static_cast<size_t>(j)][static_cast<size_t>(k)]);
  }
  SUBCASE("midpoints of a bilinear surface average the surrounding nodes") {
    const double u_mid = 0.15;  // between u nodes
    CHECK(lookup(t, u_mid, 0.01).p ==
          doctest::Approx(0.5 * (t.F[0][0] + t.F[0][1])).epsilon(1e-12));
    const double lam_mid = std::exp(0.5 * (std::log(0.01) + std::log(0.04)));
    CHECK(lookup(t, 0.2, lam_mid).p == doctest::Approx(0.5 * (t.F[0][1] + t.F[1][1])).epsilon(1e-12));
    CHECK(lookup(t, u_mid, lam_mid).p ==
          doctest::Approx(0.25 * (t.F[0][0] + t.F[0][1] + t.F[1][0] + t.F[1][1])).epsilon(1e-12));
  }
  SUBCASE("heights below the grid give p = 1") {
    CHECK(lookup(t, 0.05, 0.02).p == 1.0);
    CHECK(!lookup(t, 0.05, 0.02).below_resolution);
  }
  SUBCASE("heights above the grid give p = 0 with the below-resolution flag") {
    const auto pv = lookup(t, 0.5, 0.02);
    CHECK(pv.p == 0.0);
    CHECK(pv.below_resolution);
  }
  SUBCASE("lambda outside the table is an error") {
    CHECK_THROWS_AS(lookup(t, 0.2, 0.005), Error);
    CHECK_THROWS_AS(lookup(t, 0.2, 0.05), Error);
  }
}

TEST_CASE("single-tag heights get p exactly 1 at every table lambda") {
  const auto kernel = synthetic_peak_shape(201, 40.0);
  TableOptions opt;
  opt.n_lambda = 25;
  opt.n_u = 40;
  opt.sim_min_length = 20000;
  opt.sim_min_nonzero = 50;
  const auto t = build_table(0.005, 0.06, kernel, 5, opt);
  const double w0 = kernel.mode_weight();
  for (double lam : t.lambda_grid) CHECK(lookup(t, w0, lam).p == 1.0);
  // and strictly between grid lambdas as well
  for (size_t j = 0; j + 1 < t.lambda_grid.size(); j += 3)
    CHECK(lookup(t, w0, std::sqrt(t.lambda_grid[j] * t.lambda_grid[j + 1])).p == 1.0);
}

TEST_CASE("null validity: empirical p-value CDF is below p plus the DKW bound") {
  const auto kernel = synthetic_peak_shape(201, 40.0);
  TableOptions opt;
  opt.n_lambda = 25;
  opt.n_u = 60;
  opt.sim_min_length = 100000;
  const double lam = 0.02;
  const auto t = build_table(lam, lam, kernel, 21, opt);

  // fresh stationary track at the same rate
  const auto heights = simulate_heights(lam, kernel, 5150, 300000, 100);
  std::vector<double> p;
  p.reserve(heights.size());
  for (double h : heights) p.push_back(lookup(t, h, lam).p);
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  const double eps = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
  for (size_t i = 0; i < p.size(); ++i)
    CHECK(static_cast<double>(i + 1) / n <= p[i] + eps);
}

TEST_CASE("table file round trip is bit identical") {
  const auto kernel = synthetic_peak_shape(201, 40.0);
  TableOptions opt;
  opt.n_lambda = 10;
  opt.n_u = 20;
  opt.sim_min_length = 20000;
  opt.sim_min_nonzero = 50;
  const auto t = build_table(0.01, 0.05, kernel, 77, opt);
  const std::string path = "test_table_roundtrip.tsv";
  write_table(path, t);
  const auto back = read_table(path);
  CHECK(back.kernel_fp == t.kernel_fp);
  CHECK(back.seed == t.seed);
  REQUIRE(back.lambda_grid.size() == t.lambda_grid.size());
  REQUIRE(back.u_grid.size() == t.u_grid.size());
  for (size_t j = 0; j < t.lambda_grid.size(); ++j) CHECK(back.lambda_grid[j] == t.lambda_grid[j]);
  for (size_t k = 0; k < t.u_grid.size(); ++k) CHECK(back.u_grid[k] == t.u_grid[k]);
  for (size_t j = 0; j < t.F.size(); ++j)
    for (size_t k = 0; k < t.F[j].size(); ++k) CHECK(back.F[j][k] == t.F[j][k]);
  for (size_t j = 0; j < t.n_maxima.size(); ++j) CHECK(back.n_maxima[j] == t.n_maxima[j]);
  std::remove(path.c_str());
}
