#include "kernel.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace stem {

double Kernel::sum_sq() const {
  double s = 0.0;
  for (double x : w) s += x * x;
  return s;
}

uint64_t Kernel::fingerprint() const {
  // FNV-1a over the raw weight bits plus the length.
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  mix(static_cast<uint64_t>(w.size()));
  for (double x : w) {
    uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    mix(bits);
  }
  return h;
}

void Kernel::validate() const {
  if (w.empty() || w.size() % 2 == 0)
    fail(ErrorCode::invalid, "kernel length must be odd and positive, got " + std::to_string(w.size()));
  double s = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) fail(ErrorCode::invalid, "kernel weights must be nonnegative");
    s += x;
  }
  if (std::fabs(s - 1.0) > 1e-9)
    fail(ErrorCode::invalid, "kernel weights must sum to 1, got " + std::to_string(s));
}

std::vector<double> quartic_biweight(int64_t W) {
  if (W < 3 || W % 2 == 0)
    fail(ErrorCode::invalid, "quartic biweight width must be odd and >= 3, got " + std::to_string(W));
  const int64_t h = (W - 1) / 2;
  std::vector<double> b(static_cast<size_t>(W));
  for (int64_t t = -h; t <= h; ++t) {
    const double x = static_cast<double>(2 * t) / static_cast<double>(W - 1);
    const double y = 1.0 - x * x;
    b[static_cast<size_t>(t + h)] = y * y;
  }
  return b;
}

Kernel make_kernel(std::vector<double> weights) {
  double s = 0.0;
  for (double x : weights) s += x;
  if (!(s > 0.0)) fail(ErrorCode::invalid, "kernel weights sum to zero");
  for (double& x : weights) x /= s;
  Kernel k{std::move(weights)};
  k.validate();
  return k;
}

Kernel gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::invalid, "gaussian sigma must be positive");
  const int64_t h = std::max<int64_t>(1, llround(4.0 * sigma));
  std::vector<double> w(static_cast<size_t>(2 * h + 1));
  for (int64_t t = -h; t <= h; ++t)
    w[static_cast<size_t>(t + h)] = std::exp(-0.5 * (t / sigma) * (t / sigma));
  return make_kernel(std::move(w));
}

Kernel biweight_kernel(int64_t W) { return make_kernel(quartic_biweight(W)); }

Kernel synthetic_peak_shape(int64_t W, double core) {
  if (!(core > 0.0)) fail(ErrorCode::invalid, "peak shape core width must be positive");
  auto b = quartic_biweight(W);
  const int64_t h = (W - 1) / 2;
  for (int64_t t = -h; t <= h; ++t) {
    const double x = t / core;
    const double d = 1.0 + x * x;
    b[static_cast<size_t>(t + h)] *= 1.0 / (d * d);
  }
  return make_kernel(std::move(b));
}

void write_kernel(const std::string& path, const Kernel& k) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write kernel file: " + path);
  char buf[64];
  out << "#stem-kernel v1\n";
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(k.fingerprint()));
  out << "#fingerprint " << buf << "\n";
  const int64_t h = k.half();
  for (int64_t t = -h; t <= h; ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", k.at(t));
    out << t << '\t' << buf << '\n';
  }
  if (!out) fail(ErrorCode::io, "error writing kernel file: " + path);
}

Kernel read_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open kernel file: " + path);
  std::vector<double> w;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int64_t offset;
    double weight;
    if (!(ss >> offset >> weight))
      fail(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": malformed kernel line");
    w.push_back(weight);
  }
  if (w.empty()) fail(ErrorCode::parse, "kernel file has no weights: " + path);
  Kernel k{std::move(w)};
  k.validate();
  return k;
}

}  // namespace stem
