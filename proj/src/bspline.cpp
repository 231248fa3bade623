#include "bspline.hpp"

#include <cmath>

namespace stem {

namespace {

// In-place dense Cholesky (lower triangle). Returns false if not SPD.
bool cholesky_factor(std::vector<double>& m, int n) {
  for (int j = 0; j < n; ++j) {
    double d = m[static_cast<size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) d -= m[static_cast<size_t>(j) * n + k] * m[static_cast<size_t>(j) * n + k];
    if (!(d > 0.0)) return false;
    const double dj = std::sqrt(d);
    m[static_cast<size_t>(j) * n + j] = dj;
    for (int i = j + 1; i < n; ++i) {
      double s = m[static_cast<size_t>(i) * n + j];
      for (int k = 0; k < j; ++k) s -= m[static_cast<size_t>(i) * n + k] * m[static_cast<size_t>(j) * n + k];
      m[static_cast<size_t>(i) * n + j] = s / dj;
    }
  }
  return true;
}

void cholesky_solve(const std::vector<double>& L, int n, std::vector<double>& b) {
  for (int i = 0; i < n; ++i) {
    double s = b[static_cast<size_t>(i)];
    for (int k = 0; k < i; ++k) s -= L[static_cast<size_t>(i) * n + k] * b[static_cast<size_t>(k)];
    b[static_cast<size_t>(i)] = s / L[static_cast<size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<size_t>(i)];
    for (int k = i + 1; k < n; ++k) s -= L[static_cast<size_t>(k) * n + i] * b[static_cast<size_t>(k)];
    b[static_cast<size_t>(i)] = s / L[static_cast<size_t>(i) * n + i];
  }
}

std::vector<double> normal_equations_fit(const BSplineBasis& basis, std::span<const double> x,
                                         std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) fail(ErrorCode::invalid, "spline fit needs matching nonempty x/y");
  const int n = basis.n_basis();
  std::vector<double> G(static_cast<size_t>(n) * n, 0.0), g(static_cast<size_t>(n), 0.0);
  std::array<double, 4> v{};
  for (size_t i = 0; i < x.size(); ++i) {
    const int f = basis.nonzero(x[i], v);
    for (int r = 0; r < 4; ++r) {
      g[static_cast<size_t>(f + r)] += v[static_cast<size_t>(r)] * y[i];
      for (int c = 0; c < 4; ++c)
        G[static_cast<size_t>(f + r) * n + (f + c)] += v[static_cast<size_t>(r)] * v[static_cast<size_t>(c)];
    }
  }
  auto L = G;
  if (!cholesky_factor(L, n)) {
    // data may not cover every basis function; a tiny ridge keeps the solve
    // defined without visibly changing covered coefficients
    double maxd = 0.0;
    for (int j = 0; j < n; ++j) maxd = std::max(maxd, G[static_cast<size_t>(j) * n + j]);
    const double ridge = std::max(1e-12 * maxd, 1e-300);
    L = G;
    for (int j = 0; j < n; ++j) L[static_cast<size_t>(j) * n + j] += ridge;
    if (!cholesky_factor(L, n)) fail(ErrorCode::numeric, "spline normal equations are singular");
  }
  cholesky_solve(L, n, g);
  return g;
}

}  // namespace

BSplineBasis::BSplineBasis(double a, double b, int n_interior) : a_(a), b_(b) {
  if (!(b > a)) fail(ErrorCode::invalid, "spline domain is degenerate");
  if (n_interior < 0) fail(ErrorCode::invalid, "negative interior knot count");
  n_basis_ = n_interior + 4;
  knots_.reserve(static_cast<size_t>(n_interior) + 8);
  for (int i = 0; i < 4; ++i) knots_.push_back(a);
  for (int i = 1; i <= n_interior; ++i)
    knots_.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n_interior + 1));
  for (int i = 0; i < 4; ++i) knots_.push_back(b);
}

int BSplineBasis::find_span(double x) const {
  const int last = n_basis_ - 1;  // last valid span index
  if (x >= b_) return last;
  if (x <= a_) return 3;
  int lo = 3, hi = last;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (knots_[static_cast<size_t>(mid)] <= x)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

int BSplineBasis::nonzero(double x, std::array<double, 4>& vals) const {
  const int span = find_span(x);
  double left[4], right[4];
  vals[0] = 1.0;
  for (int j = 1; j <= 3; ++j) {
    left[j] = x - knots_[static_cast<size_t>(span + 1 - j)];
    right[j] = knots_[static_cast<size_t>(span + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? vals[static_cast<size_t>(r)] / denom : 0.0;
      vals[static_cast<size_t>(r)] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    vals[static_cast<size_t>(j)] = saved;
  }
  return span - 3;
}

double BSplineBasis::basis_value(int i, double x) const {
  std::array<double, 4> v{};
  const int f = nonzero(x, v);
  if (i < f || i > f + 3) return 0.0;
  return v[static_cast<size_t>(i - f)];
}

double FittedSpline::operator()(double x) const {
  std::array<double, 4> v{};
  const int f = basis.nonzero(x, v);
  double s = 0.0;
  for (int r = 0; r < 4; ++r) s += v[static_cast<size_t>(r)] * coef[static_cast<size_t>(f + r)];
  return s;
}

FittedSpline fit_spline(std::span<const double> x, std::span<const double> y, double knot_spacing) {
  if (x.empty()) fail(ErrorCode::invalid, "spline fit on empty data");
  if (!(knot_spacing > 0.0)) fail(ErrorCode::invalid, "knot spacing must be positive");
  const double a = x.front(), b = x.back();
  const int n_interior = std::max(0, static_cast<int>(std::floor((b - a) / knot_spacing + 0.5)) - 1);
  BSplineBasis basis(a, b, n_interior);
  return FittedSpline{basis, normal_equations_fit(basis, x, y)};
}

FittedSpline fit_spline_nbasis(std::span<const double> x, std::span<const double> y, int n_basis) {
  if (n_basis < 4) fail(ErrorCode::invalid, "need at least 4 basis functions");
  BSplineBasis basis(x.front(), x.back(), n_basis - 4);
  return FittedSpline{basis, normal_equations_fit(basis, x, y)};
}

BSplineSmoother::BSplineSmoother(std::span<const double> x, int n_basis)
    : basis_(x.front(), x.back(), n_basis - 4), n_(n_basis) {
  if (n_basis < 4) fail(ErrorCode::invalid, "need at least 4 basis functions");
  first_.resize(x.size());
  rows_.resize(x.size());
  std::vector<double> G(static_cast<size_t>(n_) * n_, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    first_[i] = basis_.nonzero(x[i], rows_[i]);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        G[static_cast<size_t>(first_[i] + r) * n_ + (first_[i] + c)] +=
            rows_[i][static_cast<size_t>(r)] * rows_[i][static_cast<size_t>(c)];
  }
  chol_ = G;
  if (!cholesky_factor(chol_, n_)) fail(ErrorCode::numeric, "spline design matrix is singular");
}

std::vector<double> BSplineSmoother::smooth(std::span<const double> y) const {
  if (y.size() != rows_.size()) fail(ErrorCode::invalid, "smoother applied to wrong-size vector");
  std::vector<double> g(static_cast<size_t>(n_), 0.0);
  for (size_t i = 0; i < y.size(); ++i)
    for (int r = 0; r < 4; ++r) g[static_cast<size_t>(first_[i] + r)] += rows_[i][static_cast<size_t>(r)] * y[i];
  cholesky_solve(chol_, n_, g);
  std::vector<double> out(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    double s = 0.0;
    for (int r = 0; r < 4; ++r) s += rows_[i][static_cast<size_t>(r)] * g[static_cast<size_t>(first_[i] + r)];
    out[i] = s;
  }
  return out;
}

}  // namespace stem
