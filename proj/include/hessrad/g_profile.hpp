#pragma once

#include <vector>

#include "hessrad/operator_spec.hpp"

namespace hessrad {

inline constexpr double kBlowupCap = 1e8;

// Solves f(g, gamma, ..., gamma) = 1 for the distinguished eigenvalue
// g = g(gamma) inside the cone. Bracket construction: the lower end sits just
// inside the cone boundary in beta (located by bisection on in_cone_ray), the
// upper end grows by doubling until f > 1; then a hybrid bracketed solve.
// Throws OutsideDomainError for gamma <= 0, NoBracketError when no admissible
// root exists below the cap, DivergenceError when the root exceeds blowup_cap.
double g_eval(const OperatorSpec& op, double gamma, double tol = 1e-12,
              double blowup_cap = kBlowupCap);

// dg/dgamma by implicit differentiation: -dfdgamma/dfdbeta at (g(gamma), gamma).
double g_prime(const OperatorSpec& op, double gamma, double tol = 1e-12);

struct Gamma0Result {
  double gamma0 = 0.0;     // infimum of gamma with finite g, from below
  double enclosure = 0.0;  // certified bracket width
};

// Left endpoint of the profile's interval: below it g exceeds the blowup cap
// or no admissible root exists. Predicate bisection on [0, c*]; certified by
// checking that g just above the endpoint still exceeds blowup_cap / 2.
Gamma0Result gamma0(const OperatorSpec& op, double tol = 1e-10,
                    double blowup_cap = kBlowupCap);

struct GProfile {
  OperatorSpec op;
  double c_star = 0.0;
  double gamma0 = 0.0;
  double gamma0_tol = 0.0;    // enclosure width for gamma0
  std::vector<double> gamma;  // log-spaced grid over (gamma0, Gamma_max]
  std::vector<double> g;
  std::vector<double> gprime;
};

// Tabulates the profile on a log-spaced grid from gamma0*(1+1e-6)+1e-12 up
// to Gamma_max = max(10 c*, 10), grid_size >= 16. All GProfile invariants
// (monotone decrease, line bound g > (1-n) gamma, g(c*) = c*) are validated
// at build time. The table is a reporting cache; evaluation goes through
// g_eval for full precision.
GProfile build_g_profile(const OperatorSpec& op, int grid_size,
                         double tol = 1e-12);

// Profile-aware evaluations: reject gamma <= gamma0 + gamma0_tol with
// OutsideDomainError instead of attempting an unreliable solve.
double g_eval(const GProfile& profile, double gamma, double tol = 1e-12);
double g_prime(const GProfile& profile, double gamma, double tol = 1e-12);

} // namespace hessrad
