#pragma once

#include <functional>

namespace hessrad {

struct RootResult {
  double root = 0.0;
  double enclosure = 0.0;  // final bracket width
  int iterations = 0;
};

// Hybrid secant/bisection solver on a sign-changing bracket [lo, hi].
// Requires f(lo) and f(hi) of opposite sign (zero endpoints are accepted as
// roots). Converges to |hi-lo| <= tol or |f| == 0. Throws NoBracketError when
// the bracket does not straddle a sign change and MaxIterError after 200
// iterations without meeting the tolerance.
RootResult solve_bracketed_root(const std::function<double(double)>& f,
                                double lo, double hi, double tol);

// Bisection on a monotone boolean predicate: pred(lo) true, pred(hi) false.
// Returns the largest located x with pred(x) true, to within tol.
RootResult bisect_predicate(const std::function<bool(double)>& pred,
                            double lo, double hi, double tol);

} // namespace hessrad
