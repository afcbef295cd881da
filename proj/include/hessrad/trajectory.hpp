#pragma once

#include <vector>

#include "hessrad/operator_spec.hpp"

namespace hessrad {

struct OdeOptions {
  double tol = 1e-10;       // local error tolerance, range [1e-13, 1e-6]
  double tail_eps = 1e-7;   // tail handoff when |W - c*| <= tail_eps*max(1,c*)
  double t_max = 60.0;      // integration horizon in t = ln r
  double slope_cap = 1e3;   // stiff-start threshold on dW/dt near t = 0
  double blowup_cap = 1e8;  // g values beyond this count as blowup
  int max_steps = 400000;
};

enum class MonotoneDir { Increasing, Decreasing, Constant };

struct TrajNode {
  double t = 0.0;  // log radius
  double w = 0.0;  // W(t)
  double f = 0.0;  // dW/dt = g(W) - W at the node
};

// Dense-output solution of dW/dt = g(W) - W, W(0) = alpha (t = ln r).
// Regular nodes carry cubic Hermite data in t. A stiff prefix, present when
// the start slope exceeds slope_cap, was marched in the W variable
// (dt/dW = 1/(g(W)-W)) and is queried by inverting the monotone cubic
// t(W). Beyond t_switch the tail model c* + delta_T e^{-n (t - T)} applies.
struct Trajectory {
  OperatorSpec op;
  double alpha = 0.0;
  double cstar = 0.0;
  MonotoneDir monotone_dir = MonotoneDir::Constant;
  std::vector<TrajNode> stiff;  // W-marched prefix (may be empty)
  std::vector<TrajNode> nodes;  // t-marched segment
  double t_switch = 0.0;        // T
  double delta_T = 0.0;         // W(T) - c*
  OdeOptions opts;
  int steps = 0;
  int rejected = 0;

  // Tail coefficient of W ~ c* + K r^{-n}. Stored shifted (t_switch,
  // delta_T) to avoid overflow in intermediates; K = delta_T e^{n T}.
  double k_tail() const;
};

// Plain t-integrator (adaptive embedded 5(4) pair, PI step control).
// Throws ParameterError for alpha <= 0 or tol outside [1e-13, 1e-6],
// AdmissibilityError when alpha is outside the admissible initial range,
// StiffStartError when the step size underflows near t = 0 (alpha too close
// to the blowup endpoint; use integrate_W_stiff_start), NonConvergenceError
// if the tail handoff is not reached by t_max.
Trajectory integrate_W(const OperatorSpec& op, double alpha,
                       const OdeOptions& opts = {});

// Stiff-start variant for gamma0 < alpha < c*: while the slope exceeds
// slope_cap, marches the inverted equation dt/dW = 1/(g(W)-W) on a W grid,
// then hands off to the regular t-march. Defers entirely to integrate_W
// when the cap is never hit. Output contract identical to integrate_W.
Trajectory integrate_W_stiff_start(const OperatorSpec& op, double alpha,
                                   const OdeOptions& opts = {});

// Dispatcher: picks the stiff start exactly when it is needed.
Trajectory integrate_auto(const OperatorSpec& op, double alpha,
                          const OdeOptions& opts = {});

// W at radius r >= 1 - 1e-12 (dense output, tail model past the switch).
double W_at(const Trajectory& tr, double r);

// dW/dt at t = ln r.
double W_deriv_at(const Trajectory& tr, double r);

// Variation with respect to the initial value:
//   dW/dalpha (r) = exp( integral_0^{ln r} (g'(W(t)) - 1) dt ),  > 0.
double dW_dalpha(const Trajectory& tr, double r, double quad_tol = 1e-10);
double dW_dalpha(const OperatorSpec& op, double alpha, double r,
                 const OdeOptions& opts = {}, double quad_tol = 1e-10);

// Solves W(r; alpha) = target for alpha (monotone in alpha). The bracket
// starts at [floor, max(c*, target)] where floor sits just above the blowup
// endpoint, and the upper end doubles until W(r, hi) >= target. Throws
// RangeError when the target is not attainable at this radius.
double W_inverse_in_alpha(const OperatorSpec& op, double r, double target,
                          double root_tol = 1e-10,
                          const OdeOptions& opts = {});

// Same, with the admissibility floor already known (alpha_lo must be
// admissible; avoids recomputing gamma0 in inner loops).
double W_inverse_in_alpha(const OperatorSpec& op, double r, double target,
                          double alpha_lo, double root_tol,
                          const OdeOptions& opts);

} // namespace hessrad
