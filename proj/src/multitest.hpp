#pragma once

#include <string>
#include <vector>

#include "kernel.hpp"
#include "survival.hpp"
#include "types.hpp"

namespace stem {

struct Peak {
  std::string chrom;
  int64_t pos = 0;
  double height = 0.0;
  double lambda0 = 0.0;
  double lambda0_plus = 0.0;
  double snr = 0.0;
  double p = 1.0;
  bool below_resolution = false;
  bool near_edge = false;
  bool significant = false;
  int64_t rank = 0;
};

// Benjamini-Hochberg step-up at FDR level q; flags[i] set iff pvalues[i] is
// declared significant. Ties at the threshold are all included.
std::vector<char> bh_select(const std::vector<double>& pvalues, double q);

void bh_mark(std::vector<Peak>& peaks, double q);

// Total deterministic ranking: significant peaks first; within them the
// below-resolution group ordered by descending SNR, then the rest by
// ascending p-value; ties broken by descending SNR, then lower address.
// Assigns ranks 1..n in order.
void rank_peaks(std::vector<Peak>& peaks);

// Right-continuous step CDF: value ys[i] for x in [xs[i], xs[i+1]), 0 before
// xs[0].
struct StepCDF {
  std::vector<double> xs;  // ascending
  std::vector<double> ys;  // nondecreasing

  double at(double x) const;      // F(x)
  double before(double x) const;  // F(x-)
};

// Exact sup-distance between two step CDFs.
double ks_distance(const StepCDF& a, const StepCDF& b);

// Empirical distribution of the observed p-values.
StepCDF observed_pvalue_cdf(std::vector<double> pvalues);

// Null p-value distribution G0(p; lambda) for a stationary smoothed Poisson
// sequence: a step function through the p-values of the attainable discrete
// heights, taken from a dedicated simulation at the nearest grid lambda and
// mapped through the table. Super-uniform by construction.
StepCDF null_pvalue_cdf(double lambda, const SurvivalTable& table, const Kernel& kernel,
                        int64_t sim_length = 2000000);

// Mixture (1/m) sum_t G0(p; lambda0_plus(t)), grouped by nearest grid
// lambda.
struct MixtureCDF {
  std::vector<std::pair<double, StepCDF>> parts;  // (weight, component)
  double at(double p) const;
};

MixtureCDF null_mixture_cdf(const std::vector<double>& lambda0_plus, const SurvivalTable& table,
                            const Kernel& kernel, int64_t sim_length = 2000000);

}  // namespace stem
