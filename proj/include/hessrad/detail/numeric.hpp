#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace hessrad::detail {

inline double binom(int n, int j) {
  if (j < 0 || j > n) return 0.0;
  if (j > n - j) j = n - j;
  double v = 1.0;
  for (int i = 1; i <= j; ++i) v = v * double(n - j + i) / double(i);
  return v;
}

inline double ipow(double x, int p) {
  double v = 1.0;
  for (int i = 0; i < p; ++i) v *= x;
  return v;
}

// Real p-th root, sign-preserving for odd p.
inline double kth_root(double s, int p) {
  if (p == 1) return s;
  if (s == 0.0) return 0.0;
  if (s > 0.0) return std::pow(s, 1.0 / double(p));
  return -std::pow(-s, 1.0 / double(p)); // callers reject even p beforehand
}

inline std::vector<double> geomspace(double a, double b, int m) {
  std::vector<double> v(m);
  const double ratio = std::pow(b / a, 1.0 / double(m - 1));
  double x = a;
  for (int i = 0; i < m; ++i) {
    v[i] = (i == m - 1) ? b : x;
    x *= ratio;
  }
  return v;
}

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Deterministic, platform-independent generator for test point sets.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double u01() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * u01(); }
  double loguniform(double a, double b) {
    return a * std::exp(u01() * std::log(b / a));
  }
};

} // namespace hessrad::detail
