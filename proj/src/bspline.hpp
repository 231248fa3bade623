#pragma once

#include <array>
#include <span>
#include <vector>

#include "types.hpp"

namespace stem {

// Clamped cubic B-spline basis on [a, b] with uniformly spaced interior
// knots. n_basis = n_interior + 4.
class BSplineBasis {
 public:
  BSplineBasis(double a, double b, int n_interior);

  int n_basis() const { return n_basis_; }
  double a() const { return a_; }
  double b() const { return b_; }

  // Index of the first of the four basis functions that are nonzero at x,
  // and their values (Cox-de Boor).
  int nonzero(double x, std::array<double, 4>& vals) const;

  double basis_value(int i, double x) const;

 private:
  int find_span(double x) const;

  double a_, b_;
  int n_basis_;
  std::vector<double> knots_;
};

// Least-squares spline fit: coefficients minimizing sum (y - f(x))^2.
struct FittedSpline {
  BSplineBasis basis;
  std::vector<double> coef;
  double operator()(double x) const;
};

FittedSpline fit_spline(std::span<const double> x, std::span<const double> y, double knot_spacing);
FittedSpline fit_spline_nbasis(std::span<const double> x, std::span<const double> y, int n_basis);

// Repeated least-squares smoothing of many response vectors on one fixed
// design (the survival table smooths 200 u-columns over the same lambda
// grid). Precomputes the design rows and the Cholesky factor of the normal
// matrix once.
class BSplineSmoother {
 public:
  BSplineSmoother(std::span<const double> x, int n_basis);
  // Returns the fitted values at the design points.
  std::vector<double> smooth(std::span<const double> y) const;

 private:
  BSplineBasis basis_;
  std::vector<int> first_;
  std::vector<std::array<double, 4>> rows_;
  std::vector<double> chol_;  // lower-triangular factor of A'A, dense n x n
  int n_;
};

}  // namespace stem
