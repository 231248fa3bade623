#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "types.hpp"

namespace stem {

// Monte Carlo estimate of F(u; lambda): the survival function of the height
// of a local maximum of a kernel-smoothed i.i.d. Poisson(lambda) sequence,
// tabulated on a (lambda, u) grid.
//
// u_grid[0] equals the kernel mode weight exactly and its survival column is
// anchored to 1, so the smallest possible local maximum (one isolated count)
// always gets a p-value of exactly 1.
struct SurvivalTable {
  std::vector<double> lambda_grid;      // ascending, log-equally spaced
  std::vector<double> u_grid;           // ascending, log-equally spaced
  std::vector<std::vector<double>> F;   // F[j][k] = F(u_grid[k]; lambda_grid[j])
  std::vector<int64_t> n_maxima;        // simulated local maxima per lambda
  uint64_t kernel_fp = 0;
  uint64_t seed = 0;
  int64_t sim_min_length = 100000;
  int64_t sim_min_nonzero = 100;
  double data_lambda_min = 0.0, data_lambda_max = 0.0, margin = 0.25;

  double lambda_min() const { return lambda_grid.front(); }
  double lambda_max() const { return lambda_grid.back(); }
};

struct TableOptions {
  int n_lambda = 300;
  int n_u = 200;
  double margin = 0.25;
  int64_t sim_min_length = 100000;
  int64_t sim_min_nonzero = 100;
  int threads = 1;
};

// Heights (ascending) of all local maxima of a smoothed i.i.d. Poisson
// sequence. The sequence is at least min_length long and is extended until
// it holds at least min_nonzero nonzero counts.
std::vector<double> simulate_heights(double lambda, const Kernel& kernel, uint64_t seed,
                                     int64_t min_length = 100000, int64_t min_nonzero = 100);

// data_lambda_min/max: the lambda0+ range observed in the data; the grid is
// widened by the safety margin on both sides.
SurvivalTable build_table(double data_lambda_min, double data_lambda_max, const Kernel& kernel,
                          uint64_t seed, const TableOptions& opt = {});

struct PValue {
  double p = 1.0;
  bool below_resolution = false;
};

// Bilinear interpolation in (log lambda, u). u below the grid -> 1; u above
// the grid -> 0 with the below_resolution flag; lambda outside the grid is
// an error (the table was built for different data).
PValue lookup(const SurvivalTable& table, double u, double lambda);

int nearest_lambda_index(const SurvivalTable& table, double lambda);

void write_table(const std::string& path, const SurvivalTable& table);
SurvivalTable read_table(const std::string& path);

}  // namespace stem
