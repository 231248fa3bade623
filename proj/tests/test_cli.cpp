#include <sys/wait.h>

#include <cmath>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "rng.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = std::string(STEM_CLI_BIN) + " " + args + " > " + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_tracks(const TempDir& dir) {
  // IP: thin background plus three dense clusters; Control: background only
  stem::Rng rng(4242);
  std::map<int64_t, int> ip, ctrl;
  const int64_t len = 400000;
  for (int i = 0; i < 700; ++i) ++ctrl[rng.uniform_below(len)];
  for (int i = 0; i < 560; ++i) ++ip[rng.uniform_below(len)];
  for (const int64_t c : {50000, 170000, 330000})
    for (int i = 0; i < 7; ++i) ++ip[c + rng.uniform_below(121) - 60];

  std::ofstream ipf(dir.file("ip_track.tsv")), cf(dir.file("control_track.tsv"));
  for (const auto& [p, c] : ip) ipf << "sim\t" << p << '\t' << c << '\n';
  for (const auto& [p, c] : ctrl) cf << "sim\t" << p << '\t' << c << '\n';
  std::ofstream lens(dir.file("lengths.tsv"));
  lens << "sim\t" << len << '\n';
  std::ofstream conf(dir.file("small.conf"));
  conf << "lambda_grid_size=40\nu_grid_size=60\nsim_min_length=30000\n"
       << "genome_length=400000\nthreads=2\n";
}

}  // namespace

TEST_CASE("cli call runs end to end on track inputs and is byte deterministic") {
  TempDir dir("stem_cli_call");
  write_tracks(dir);

  const std::string base = "call --config " + dir.file("small.conf") + " --ip-track " +
                           dir.file("ip_track.tsv") + " --control-track " +
                           dir.file("control_track.tsv") + " --chrom-lengths " +
                           dir.file("lengths.tsv") + " --q 0.1 --seed 99 --dump-candidates";
  // no kernel file: synthesize one via `simulate`? call requires a kernel;
  // write one directly instead
  {
    std::ofstream k(dir.file("kernel.tsv"));
    // small triangular kernel, unit sum
    const int64_t h = 50;
    double s = 0.0;
    std::vector<double> w;
    for (int64_t t = -h; t <= h; ++t) {
      w.push_back(static_cast<double>(h + 1 - std::llabs(t)));
      s += w.back();
    }
    int64_t t = -h;
    for (double v : w) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v / s);
      k << t++ << '\t' << buf << '\n';
    }
  }

  const int rc1 = run_cli(base + " --kernel " + dir.file("kernel.tsv") + " --out " + dir.file("out1"),
                          dir.file("log1.txt"));
  CHECK_MESSAGE(rc1 == 0, slurp(dir.file("log1.txt")));
  const int rc2 = run_cli(base + " --kernel " + dir.file("kernel.tsv") + " --out " + dir.file("out2"),
                          dir.file("log2.txt"));
  CHECK(rc2 == 0);

  const std::string p1 = slurp(dir.file("out1") + "/peaks.tsv");
  const std::string p2 = slurp(dir.file("out2") + "/peaks.tsv");
  CHECK(p1 == p2);
  CHECK(slurp(dir.file("out1") + "/run_report.txt") == slurp(dir.file("out2") + "/run_report.txt"));
  CHECK(fs::exists(dir.file("out1") + "/candidates.tsv"));
  CHECK(fs::exists(dir.file("out1") + "/table.tsv"));

  // the three planted clusters are all recovered as significant peaks
  int found = 0;
  std::istringstream lines(p1);
  std::string line;
  std::getline(lines, line);  // header
  std::vector<std::pair<int64_t, bool>> rows;
  while (std::getline(lines, line)) {
    std::istringstream ss(line);
    std::string rank, chrom, pos, height, l0, l0p, snr, pv, below, sig;
    std::getline(ss, rank, '\t');
    std::getline(ss, chrom, '\t');
    std::getline(ss, pos, '\t');
    std::getline(ss, height, '\t');
    std::getline(ss, l0, '\t');
    std::getline(ss, l0p, '\t');
    std::getline(ss, snr, '\t');
    std::getline(ss, pv, '\t');
    std::getline(ss, below, '\t');
    std::getline(ss, sig, '\t');
    rows.emplace_back(std::stoll(pos), sig == "1");
  }
  for (const int64_t c : {50000, 170000, 330000})
    for (const auto& [pos, sig] : rows)
      if (sig && std::llabs(pos - c) <= 100) {
        ++found;
        break;
      }
  CHECK(found == 3);
}

TEST_CASE("cli simulate produces replicate and summary tables") {
  TempDir dir("stem_cli_sim");
  const std::string args = "simulate --length 200000 --spikes 4 --snr 8 --replicates 2 --q 0.2 "
                           "--template-block 10000 --seed 7 --threads 2 --out " +
                           dir.file("sim") + " --config " + dir.file("small.conf");
  {
    std::ofstream conf(dir.file("small.conf"));
    conf << "lambda_grid_size=30\nu_grid_size=50\nsim_min_length=30000\nkernel_window=401\n";
  }
  const int rc = run_cli(args, dir.file("log.txt"));
  CHECK_MESSAGE(rc == 0, slurp(dir.file("log.txt")));
  const std::string reps = slurp(dir.file("sim") + "/simulate_replicates.tsv");
  CHECK(reps.find("snr\treplicate") == 0);
  // 2 replicates -> header + 2 rows
  CHECK(std::count(reps.begin(), reps.end(), '\n') == 3);
  const std::string summary = slurp(dir.file("sim") + "/simulate_summary.tsv");
  CHECK(summary.find("snr\tmean_fdp\tmean_power") == 0);
}

TEST_CASE("cli reports missing inputs with the path and a nonzero exit") {
  TempDir dir("stem_cli_missing");
  const int rc = run_cli("align --ip " + dir.file("nope.tsv") + " --out " + dir.file("o"),
                         dir.file("log.txt"));
  CHECK(rc == 1);
  const std::string log = slurp(dir.file("log.txt"));
  CHECK(log.find("nope.tsv") != std::string::npos);
}

TEST_CASE("cli align then diagnose on synthetic site data") {
  TempDir dir("stem_cli_align");
  {
    stem::Rng rng(31415);
    std::ofstream out(dir.file("ip.tsv"));
    auto spread = [&rng]() {
      const double mag = -50.0 * std::log(std::max(rng.uniform01(), 1e-12));
      const double sgn = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      return std::clamp<int64_t>(static_cast<int64_t>(llround(sgn * mag)), -250, 250);
    };
    for (int s = 0; s < 900; ++s) {
      const int64_t center = 2000 + s * 3000;
      for (int i = 0; i < 20; ++i) {
        const int64_t floc = center - 62 + spread();
        const int64_t rloc = center + 62 + spread();
        out << "chr1\t" << floc << '\t' << floc + 35 << "\t+\n";
        out << "chr1\t" << rloc - 34 << '\t' << rloc + 1 << "\t-\n";
      }
    }
  }
  const int rc = run_cli("align --ip " + dir.file("ip.tsv") + " --n-peaks 600 --out " + dir.file("a"),
                         dir.file("log.txt"));
  CHECK_MESSAGE(rc == 0, slurp(dir.file("log.txt")));
  const long shift = std::stol(slurp(dir.file("a") + "/shift.txt"));
  CHECK(std::labs(shift - 62) <= 2);
  CHECK(fs::exists(dir.file("a") + "/kernel.tsv"));
  CHECK(fs::exists(dir.file("a") + "/profiles.tsv"));

  // diagnose using the estimated kernel with the IP as its own control
  {
    std::ofstream conf(dir.file("d.conf"));
    conf << "lambda_grid_size=30\nu_grid_size=50\nsim_min_length=30000\ng0_sim_length=200000\n"
         << "p_grid_size=101\n";
  }
  const int rc2 = run_cli("diagnose --config " + dir.file("d.conf") + " --ip " + dir.file("ip.tsv") +
                              " --control " + dir.file("ip.tsv") + " --shift " +
                              std::to_string(shift) + " --kernel " + dir.file("a") +
                              "/kernel.tsv --out " + dir.file("d"),
                          dir.file("log2.txt"));
  CHECK_MESSAGE(rc2 == 0, slurp(dir.file("log2.txt")));
  const std::string diag = slurp(dir.file("d") + "/diagnostics.tsv");
  CHECK(diag.find("p\tG_hat\tG0_hat") == 0);
  CHECK(std::count(diag.begin(), diag.end(), '\n') == 102);
}
