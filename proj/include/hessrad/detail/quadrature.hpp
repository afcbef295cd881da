#pragma once

#include <cmath>
#include <functional>

#include "hessrad/errors.hpp"

namespace hessrad::detail {

// 7-point Gauss-Legendre on [a,b].
template <class F>
double gauss7(const F& f, double a, double b) {
  static const double xs[7] = {
      -0.94910791234275852453, -0.74153118559939443986, -0.40584515137739716691,
      0.0,
      0.40584515137739716691,  0.74153118559939443986,  0.94910791234275852453};
  static const double ws[7] = {
      0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
      0.41795918367346938776,
      0.38183005050511894495, 0.27970539148927666790, 0.12948496616886969327};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 7; ++i) s += ws[i] * f(mid + half * xs[i]);
  return s * half;
}

template <class F>
double adaptive_gauss_rec(const F& f, double a, double b, double whole,
                          double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss7(f, a, m);
  const double right = gauss7(f, m, b);
  const double delta = left + right - whole;
  // Splitting below the rounding floor of the panel values cannot improve
  // the estimate, it only multiplies panels; stop there as well as at the
  // requested tolerance or when the midpoint is no longer representable.
  const double floor =
      64.0 * 2.220446049250313e-16 * (std::abs(left) + std::abs(right));
  if (std::abs(delta) <= std::max(tol, floor) || depth >= 32 || m <= a ||
      m >= b)
    return left + right;
  return adaptive_gauss_rec(f, a, m, left, 0.5 * tol, depth + 1) +
         adaptive_gauss_rec(f, m, b, right, 0.5 * tol, depth + 1);
}

// Recursively refined Gauss quadrature with absolute tolerance.
template <class F>
double adaptive_gauss(const F& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  return adaptive_gauss_rec(f, a, b, gauss7(f, a, b), tol, 0);
}

} // namespace hessrad::detail
