#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "rng.hpp"
#include "stem/stem.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Tag file with planted binding sites: per site, forward tags upstream and
// reverse tags downstream of the center, displaced by +-62 with a peaked
// heavy-tailed spread (Laplace scale 50, like fragment-length variation).
void write_site_tags(const std::string& path, int n_sites, uint64_t seed) {
  stem::Rng rng(seed);
  std::ofstream out(path);
  out << "#chrom\tstart\tend\tstrand\n";
  const int64_t spacing = 3000;
  auto spread = [&rng]() {
    const double mag = -50.0 * std::log(std::max(rng.uniform01(), 1e-12));
    const double sgn = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    return std::clamp<int64_t>(static_cast<int64_t>(llround(sgn * mag)), -250, 250);
  };
  for (int s = 0; s < n_sites; ++s) {
    const int64_t center = 2000 + s * spacing;
    for (int i = 0; i < 20; ++i) {
      const int64_t floc = center - 62 + spread();
      const int64_t rloc = center + 62 + spread();
      out << "chr1\t" << floc << '\t' << floc + 35 << "\t+\n";
      out << "chr1\t" << rloc - 34 << '\t' << rloc + 1 << "\t-\n";
    }
  }
}

}  // namespace

TEST_CASE("config set/get and unknown keys") {
  stem_config* cfg = stem_config_new();
  REQUIRE(cfg != nullptr);
  CHECK(stem_config_set(cfg, "q", "0.05") == STEM_OK);
  char buf[64];
  CHECK(stem_config_get(cfg, "q", buf, sizeof buf) > 0);
  CHECK(std::string(buf) == "0.05");
  CHECK(stem_config_set(cfg, "no_such_key", "1") == STEM_ERR_INVALID);
  CHECK(std::string(stem_last_error()).find("no_such_key") != std::string::npos);
  CHECK(stem_config_set(cfg, "q", "not_a_number") == STEM_ERR_PARSE);
  CHECK(stem_config_get(cfg, "no_such_key", buf, sizeof buf) == -1);
  stem_config_free(cfg);
}

TEST_CASE("config file loading") {
  TempDir dir("stem_capi_cfg");
  {
    std::ofstream out(dir.file("run.conf"));
    out << "# comment\nq=0.07\nthreads=2\n";
  }
  stem_config* cfg = stem_config_new();
  CHECK(stem_config_load(cfg, dir.file("run.conf").c_str()) == STEM_OK);
  char buf[64];
  stem_config_get(cfg, "q", buf, sizeof buf);
  CHECK(std::string(buf) == "0.07");
  CHECK(stem_config_load(cfg, dir.file("missing.conf").c_str()) == STEM_ERR_IO);
  stem_config_free(cfg);
}

TEST_CASE("align, table, call and diagnose through the C API") {
  TempDir dir("stem_capi_run");
  write_site_tags(dir.file("ip.tsv"), 1200, 1001);

  stem_config* cfg = stem_config_new();
  REQUIRE(stem_config_set(cfg, "ip", dir.file("ip.tsv").c_str()) == STEM_OK);
  REQUIRE(stem_config_set(cfg, "out", dir.file("align").c_str()) == STEM_OK);
  REQUIRE(stem_config_set(cfg, "n_strong_peaks", "800") == STEM_OK);

  REQUIRE_MESSAGE(stem_run_align(cfg) == STEM_OK, stem_last_error());
  const std::string shift_text = slurp(dir.file("align") + "/shift.txt");
  const long shift = std::stol(shift_text);
  CHECK(std::labs(shift - 62) <= 2);

  stem_kernel* kernel = stem_kernel_load((dir.file("align") + "/kernel.tsv").c_str());
  REQUIRE(kernel != nullptr);
  CHECK(stem_kernel_width(kernel) == 801);
  CHECK(stem_kernel_weight(kernel, 0) > stem_kernel_weight(kernel, 100));
  CHECK(stem_kernel_weight(kernel, 400) == 0.0);
  CHECK(stem_kernel_weight(kernel, 9999) == 0.0);

  // survival table over a small rate range
  stem_config* tcfg = stem_config_new();
  stem_config_set(tcfg, "kernel", (dir.file("align") + "/kernel.tsv").c_str());
  stem_config_set(tcfg, "out", dir.file("tab").c_str());
  stem_config_set(tcfg, "table_lambda_min", "0.002");
  stem_config_set(tcfg, "table_lambda_max", "0.02");
  stem_config_set(tcfg, "lambda_grid_size", "40");
  stem_config_set(tcfg, "u_grid_size", "60");
  stem_config_set(tcfg, "sim_min_length", "30000");
  stem_config_set(tcfg, "threads", "4");
  REQUIRE_MESSAGE(stem_run_table(tcfg) == STEM_OK, stem_last_error());

  stem_table* table = stem_table_load((dir.file("tab") + "/table.tsv").c_str());
  REQUIRE(table != nullptr);
  CHECK(stem_table_fingerprint(table) == stem_kernel_fingerprint(kernel));
  CHECK(stem_table_lambda_min(table) == doctest::Approx(0.0015));
  CHECK(stem_table_lambda_max(table) == doctest::Approx(0.025));

  // one isolated tag has p-value exactly 1 at any rate in range
  double p = 0.0;
  int below = 0;
  REQUIRE(stem_table_pvalue(table, stem_kernel_weight(kernel, 0), 0.01, &p, &below) == STEM_OK);
  CHECK(p == 1.0);
  CHECK(below == 0);
  // heights beyond the table resolution are flagged
  REQUIRE(stem_table_pvalue(table, 1e9, 0.01, &p, &below) == STEM_OK);
  CHECK(p == 0.0);
  CHECK(below == 1);
  // out-of-range rates are a state error
  CHECK(stem_table_pvalue(table, 0.01, 1e-6, &p, &below) == STEM_ERR_STATE);

  // full call: reuse the IP tags with a thin uniform control
  {
    stem::Rng rng(77);
    std::ofstream out(dir.file("control.tsv"));
    for (int i = 0; i < 9000; ++i) {
      const int64_t loc = rng.uniform_below(3600000);
      const bool fwd = rng.uniform01() < 0.5;
      if (fwd)
        out << "chr1\t" << loc << '\t' << loc + 35 << "\t+\n";
      else
        out << "chr1\t" << loc << '\t' << loc + 35 << "\t-\n";
    }
  }
  stem_config* ccfg = stem_config_new();
  stem_config_set(ccfg, "ip", dir.file("ip.tsv").c_str());
  stem_config_set(ccfg, "control", dir.file("control.tsv").c_str());
  stem_config_set(ccfg, "kernel", (dir.file("align") + "/kernel.tsv").c_str());
  stem_config_set(ccfg, "shift", shift_text.substr(0, shift_text.find('\n')).c_str());
  stem_config_set(ccfg, "out", dir.file("call").c_str());
  stem_config_set(ccfg, "q", "0.05");
  stem_config_set(ccfg, "lambda_grid_size", "40");
  stem_config_set(ccfg, "u_grid_size", "60");
  stem_config_set(ccfg, "sim_min_length", "30000");
  stem_config_set(ccfg, "threads", "4");
  REQUIRE_MESSAGE(stem_run_call(ccfg) == STEM_OK, stem_last_error());

  const std::string peaks = slurp(dir.file("call") + "/peaks.tsv");
  CHECK(peaks.find("rank\tchrom\tposition") == 0);
  const std::string report = slurp(dir.file("call") + "/run_report.txt");
  CHECK(report.find("significant=") != std::string::npos);
  // planted sites should be found: significant count is large
  const size_t pos = report.find("significant=");
  const long n_sig = std::stol(report.substr(pos + 12));
  CHECK(n_sig > 800);

  // a table built for a different kernel is refused
  stem_config* mcfg = stem_config_new();
  stem_config_set(mcfg, "ip", dir.file("ip.tsv").c_str());
  stem_config_set(mcfg, "control", dir.file("control.tsv").c_str());
  stem_config_set(mcfg, "kernel", (dir.file("align") + "/kernel.tsv").c_str());
  stem_config_set(mcfg, "table", (dir.file("tab") + "/table.tsv").c_str());
  stem_config_set(mcfg, "out", dir.file("call2").c_str());
  // tamper: rebuild the table with a different kernel
  {
    stem_config* t2 = stem_config_new();
    stem_config_set(t2, "kernel", (dir.file("align") + "/kernel.tsv").c_str());
    stem_config_set(t2, "out", dir.file("tab2").c_str());
    stem_config_set(t2, "table_lambda_min", "0.002");
    stem_config_set(t2, "table_lambda_max", "0.02");
    stem_config_set(t2, "lambda_grid_size", "10");
    stem_config_set(t2, "u_grid_size", "20");
    stem_config_set(t2, "sim_min_length", "20000");
    REQUIRE(stem_run_table(t2) == STEM_OK);
    stem_config_free(t2);
    // swap in a kernel file that does not match the table
    std::ofstream bad(dir.file("align") + "/other_kernel.tsv");
    bad << "0\t1.0\n-1\t0.0\n1\t0.0\n";
  }
  stem_config_set(mcfg, "kernel", (dir.file("align") + "/other_kernel.tsv").c_str());
  CHECK(stem_run_call(mcfg) == STEM_ERR_STATE);
  CHECK(std::string(stem_last_error()).find("fingerprint") != std::string::npos);

  // missing inputs surface as IO errors naming the path
  stem_config* badcfg = stem_config_new();
  stem_config_set(badcfg, "ip", dir.file("absent.tsv").c_str());
  stem_config_set(badcfg, "out", dir.file("x").c_str());
  CHECK(stem_run_align(badcfg) == STEM_ERR_IO);
  CHECK(std::string(stem_last_error()).find("absent.tsv") != std::string::npos);

  stem_config_free(badcfg);
  stem_config_free(mcfg);
  stem_config_free(ccfg);
  stem_config_free(tcfg);
  stem_table_free(table);
  stem_kernel_free(kernel);
  stem_config_free(cfg);
}

TEST_CASE("empty IP input yields an empty peak table and success") {
  TempDir dir("stem_capi_empty");
  {
    std::ofstream ip(dir.file("ip.tsv"));
    ip << "#empty\n";
    std::ofstream ctrl(dir.file("control.tsv"));
    ctrl << "chr1\t100\t135\t+\n";
    std::ofstream k(dir.file("kernel.tsv"));
    k << "-1\t0.0\n0\t1.0\n1\t0.0\n";
  }
  stem_config* cfg = stem_config_new();
  stem_config_set(cfg, "ip", dir.file("ip.tsv").c_str());
  stem_config_set(cfg, "control", dir.file("control.tsv").c_str());
  stem_config_set(cfg, "kernel", dir.file("kernel.tsv").c_str());
  stem_config_set(cfg, "out", dir.file("out").c_str());
  CHECK(stem_run_call(cfg) == STEM_OK);
  const std::string peaks = slurp(dir.file("out") + "/peaks.tsv");
  CHECK(peaks == "rank\tchrom\tposition\theight\tlambda0\tlambda0_plus\tsnr\tpvalue\tbelow_resolution\tsignificant\n");
  stem_config_free(cfg);
}
