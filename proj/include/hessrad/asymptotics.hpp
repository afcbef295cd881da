#pragma once

#include "hessrad/g_profile.hpp"
#include "hessrad/trajectory.hpp"

namespace hessrad {

struct MuResult {
  double mu = 0.0;        // integral_1^inf s (W(s) - c*) ds
  double integral = 0.0;  // finite part, integral_0^T e^{2t}(W - c*) dt
  double tail = 0.0;      // analytic remainder delta_T e^{2T} / (n - 2)
  double t_switch = 0.0;
  double delta_T = 0.0;
  double tail_fraction = 0.0;  // |tail| / max(|mu|, eps) diagnostic
};

// Asymptotic correction mu(alpha), evaluated in the log variable over the
// stored trajectory plus the closed-form tail. quad_tol is absolute.
MuResult mu_detailed(const Trajectory& tr, double quad_tol = 1e-12);
double mu(const OperatorSpec& op, double alpha, double quad_tol = 1e-9,
          const OdeOptions& opts = {});

struct AlphaMinResult {
  double alpha_min = 0.0;
  double enclosure = 0.0;
  double r_sup = 0.0;  // extent of the doubling radius grid checked
  double gamma0_value = 0.0;
  double gamma0_enclosure = 0.0;
};

// Admissibility floor: sup over the geometric grid r in {1, 2, 4, ..., R}
// of the alpha needed to keep W(r) above the blowup endpoint, with R doubled
// until the sup stops moving. W is monotone along trajectories so the sup
// lives at r = 1; the sweep verifies that instead of assuming it.
AlphaMinResult alpha_min(const OperatorSpec& op, double tol = 1e-10,
                         const OdeOptions& opts = {});

struct ThresholdDiagnostics {
  double tail_fraction_of_mu = 0.0;
  double extrapolation_spread = 0.0;
  double alpha_min_minus_gamma0 = 0.0;
};

struct ThresholdReport {
  OperatorSpec op;
  double gamma0 = 0.0;
  double alpha_min = 0.0;
  double mu_at_alpha_min = 0.0;  // one-sided limit mu(alpha_min^+)
  double b = 0.0;
  double c0 = 0.0;  // = mu_at_alpha_min + b - c_star/2
  ThresholdDiagnostics diagnostics;
};

// Existence threshold c0(b). mu at the boundary parameter is the limit of
// mu(alpha_min + eps) over eps in {1e-3, 1e-4, 1e-5}*max(1, c*) with
// Richardson/Aitken extrapolation. Throws ExtrapolationError when the ladder
// fails to settle into a Cauchy-decreasing pattern.
ThresholdReport c0(const OperatorSpec& op, double b, double tol = 1e-9,
                   const OdeOptions& opts = {});

// Solves mu(alpha) = target (mu is strictly increasing). Initial bracket
// [alpha_min + eps, hi] with hi doubled until mu(hi) > target. Throws
// RangeError when target < mu(alpha_min^+) - tol.
double mu_inverse(const OperatorSpec& op, double target, double tol = 1e-9,
                  const OdeOptions& opts = {});

struct ExistenceVerdict {
  bool exists = false;
  bool has_alpha = false;
  double alpha = 0.0;  // shooting parameter, valid when has_alpha
  double margin = 0.0; // c - c0
  double c = 0.0;
  double c0 = 0.0;
  double b = 0.0;
};

// Theorem-level classifier: a solution with boundary value b and asymptotic
// constant c exists iff c >= c0(b) - tol; when it does, alpha inverts
// mu(alpha) = c - b + c*/2.
ExistenceVerdict classify_existence(const OperatorSpec& op, double b, double c,
                                    double tol = 1e-9,
                                    const OdeOptions& opts = {});

} // namespace hessrad
