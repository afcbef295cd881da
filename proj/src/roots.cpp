#include "hessrad/roots.hpp"

#include <cmath>

#include "hessrad/errors.hpp"

namespace hessrad {

RootResult solve_bracketed_root(const std::function<double(double)>& f,
                                double lo, double hi, double tol) {
  if (!(lo < hi)) throw ParameterError("root bracket requires lo < hi");
  if (!(tol > 0.0)) throw ParameterError("root tolerance must be positive");
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if (std::isnan(flo) || std::isnan(fhi))
    throw NoBracketError("root bracket endpoint evaluated to NaN");
  if ((flo > 0.0) == (fhi > 0.0))
    throw NoBracketError("no sign change on the supplied bracket");

  double a = lo, b = hi, fa = flo, fb = fhi;
  for (int it = 1; it <= 200; ++it) {
    // Secant proposal, clipped away from the endpoints; fall back to the
    // midpoint when it degenerates or lands outside the safe interior.
    double x;
    const double denom = fb - fa;
    if (denom != 0.0) {
      x = b - fb * (b - a) / denom;
      const double guard = 0.01 * (b - a);
      if (!(x > a + guard && x < b - guard)) x = 0.5 * (a + b);
    } else {
      x = 0.5 * (a + b);
    }
    const double fx = f(x);
    if (fx == 0.0 || std::isnan(fx)) {
      if (std::isnan(fx)) throw NoBracketError("root iterate evaluated to NaN");
      return {x, b - a, it};
    }
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (b - a <= tol) return {0.5 * (a + b), b - a, it};
  }
  throw MaxIterError("bracketed root solve exceeded 200 iterations");
}

RootResult bisect_predicate(const std::function<bool(double)>& pred,
                            double lo, double hi, double tol) {
  if (!(lo < hi)) throw ParameterError("predicate bracket requires lo < hi");
  if (!(tol > 0.0)) throw ParameterError("predicate tolerance must be positive");
  if (!pred(lo)) throw NoBracketError("predicate false at lower endpoint");
  if (pred(hi)) throw NoBracketError("predicate true at upper endpoint");
  double a = lo, b = hi;
  int it = 0;
  while (b - a > tol && it < 200) {
    const double m = 0.5 * (a + b);
    if (pred(m))
      a = m;
    else
      b = m;
    ++it;
  }
  return {a, b - a, it};
}

} // namespace hessrad
