#include "hessrad/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hessrad/detail/quadrature.hpp"
#include "hessrad/errors.hpp"
#include "hessrad/roots.hpp"

namespace hessrad {

namespace {

// Cubic Hermite value / derivative (duplicated from the integrator's
// internals on purpose: the node layout is the shared contract, not the
// interpolation code path).
double hermite(double x0, double y0, double d0, double x1, double y1,
               double d1, double x) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 +
         (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

double hermite_deriv(double x0, double y0, double d0, double x1, double y1,
                     double d1, double x) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * d0 +
          (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * h * d1) /
         h;
}

} // namespace

MuResult mu_detailed(const Trajectory& tr, double quad_tol) {
  if (tr.op.n < 3)
    throw DivergenceError("mu requires n >= 3 for the tail to converge");
  if (!(quad_tol > 0.0))
    throw ParameterError("quad_tol must be positive");

  const double cs = tr.cstar;
  const double T = tr.t_switch;
  const double total_t = std::max(T, 1e-30);
  double finite = 0.0;

  // Stiff prefix: substitute w for t,
  //   e^{2t}(W - c*) dt = e^{2 t(w)} (w - c*) t'(w) dw,
  // with t(w) the stored cubic Hermite (values t, slopes 1/f).
  for (size_t i = 0; i + 1 < tr.stiff.size(); ++i) {
    const auto& a = tr.stiff[i];
    const auto& b = tr.stiff[i + 1];
    const double tol_i =
        quad_tol * std::max(b.t - a.t, 1e-30) / total_t + 1e-300;
    finite += detail::adaptive_gauss(
        [&](double w) {
          const double tw =
              hermite(a.w, a.t, 1.0 / a.f, b.w, b.t, 1.0 / b.f, w);
          const double dtdw =
              hermite_deriv(a.w, a.t, 1.0 / a.f, b.w, b.t, 1.0 / b.f, w);
          return std::exp(2.0 * tw) * (w - cs) * dtdw;
        },
        a.w, b.w, tol_i);
  }

  // Regular nodes: each interval is a cubic times e^{2t}; one adaptive
  // pass per interval with a length-proportional error budget. The Hermite
  // is evaluated on the shifted values w - c* (it is linear in the values,
  // and the node subtractions are exact): forming hermite(w) - c* instead
  // rounds at the scale of w, which near the tail is many orders above the
  // gap and makes the integrand pure noise for the adaptive refinement.
  for (size_t i = 0; i + 1 < tr.nodes.size(); ++i) {
    const auto& a = tr.nodes[i];
    const auto& b = tr.nodes[i + 1];
    const double tol_i =
        quad_tol * std::max(b.t - a.t, 1e-30) / total_t + 1e-300;
    finite += detail::adaptive_gauss(
        [&](double t) {
          return std::exp(2.0 * t) *
                 hermite(a.t, a.w - cs, a.f, b.t, b.w - cs, b.f, t);
        },
        a.t, b.t, tol_i);
  }

  MuResult out;
  out.integral = finite;
  out.t_switch = T;
  out.delta_T = tr.delta_T;
  out.tail = tr.delta_T * std::exp(2.0 * T) /
             (static_cast<double>(tr.op.n) - 2.0);
  out.mu = out.integral + out.tail;
  out.tail_fraction = std::abs(out.tail) / std::max(std::abs(out.mu), 1e-300);
  return out;
}

double mu(const OperatorSpec& op, double alpha, double quad_tol,
          const OdeOptions& opts) {
  const Trajectory tr = integrate_auto(op, alpha, opts);
  return mu_detailed(tr, quad_tol).mu;
}

AlphaMinResult alpha_min(const OperatorSpec& op, double tol,
                         const OdeOptions& opts) {
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  const double g0_tol = std::min(tol, 1e-10);
  const auto g0 = gamma0(op, g0_tol, opts.blowup_cap);
  const double target = g0.gamma0 + g0.enclosure;

  // Sup over the doubling radius grid of the alpha needed to keep W(r)
  // above the blowup endpoint. At r = 1 the constraint is the identity
  // W(1, alpha) = alpha, so the candidate is the target itself. Radii
  // where alpha = target already clears the target contribute no
  // constraint; that covers every radius in one trajectory integration,
  // so the inverse solve (one fresh integration per bracket endpoint)
  // only runs on radii that actually bind.
  double sup = target;
  const Trajectory tr_floor = integrate_auto(op, target, opts);
  auto candidate_at = [&](double r) {
    if (r == 1.0) return target;
    if (W_at(tr_floor, r) > target) return -1.0;  // unconstrained radius
    try {
      return W_inverse_in_alpha(op, r, target, target, tol, opts);
    } catch (const RangeError&) {
      return -1.0;
    }
  };

  double r_max = 1.0;
  double prev_sup = sup;
  int stable_rounds = 0;
  // Initial grid up to 16, then keep doubling the extent until the sup
  // holds still for two consecutive extensions.
  for (double r = 2.0; r <= 16.0; r *= 2.0) {
    sup = std::max(sup, candidate_at(r));
    r_max = r;
  }
  prev_sup = sup;
  while (stable_rounds < 2) {
    r_max *= 2.0;
    if (r_max > 1e7)
      throw NonConvergenceError(
          "admissibility sup did not stabilize under radius doubling");
    sup = std::max(sup, candidate_at(r_max));
    if (std::abs(sup - prev_sup) <= 0.25 * tol * std::max(1.0, sup))
      ++stable_rounds;
    else
      stable_rounds = 0;
    prev_sup = sup;
  }

  AlphaMinResult out;
  out.alpha_min = sup;
  out.enclosure = g0.enclosure;
  out.r_sup = r_max;
  out.gamma0_value = g0.gamma0;
  out.gamma0_enclosure = g0.enclosure;
  return out;
}

namespace {

ThresholdReport c0_with_floor(const OperatorSpec& op, double b, double tol,
                              const OdeOptions& opts,
                              const AlphaMinResult& am) {
  const double cs = c_star(op);
  const double mu_quad = std::min(1e-12, 1e-3 * tol);

  // mu(alpha_min^+) as the limit of a three-rung epsilon ladder with
  // Aitken extrapolation. Near the admissibility floor mu is flat
  // (mu' vanishes there), so the rung differences decay geometrically
  // and the extrapolated residual is far below tol.
  const double scale = std::max(1.0, cs);
  const double eps1 = 1e-3 * scale, eps2 = 1e-4 * scale, eps3 = 1e-5 * scale;

  const Trajectory tr3 = integrate_auto(op, am.alpha_min + eps3, opts);
  const MuResult m3 = mu_detailed(tr3, mu_quad);
  const double mu1 = mu(op, am.alpha_min + eps1, mu_quad, opts);
  const double mu2 = mu(op, am.alpha_min + eps2, mu_quad, opts);
  const double mu3 = m3.mu;

  const double d1 = mu2 - mu1;
  const double d2 = mu3 - mu2;
  const double noise = 10.0 * tol * std::max(1.0, std::abs(mu3));
  if (!(std::abs(d2) <= noise || std::abs(d2) <= std::abs(d1)))
    throw ExtrapolationError(
        "epsilon ladder for mu(alpha_min^+) is not settling: |d2|=" +
        std::to_string(std::abs(d2)) + " exceeds |d1|=" +
        std::to_string(std::abs(d1)));

  double mu_lim = mu3;
  const double denom = d2 - d1;
  if (std::abs(denom) > 1e-300 && std::abs(d2) > noise)
    mu_lim = mu3 - d2 * d2 / denom;

  ThresholdReport rep;
  rep.op = op;
  rep.gamma0 = am.gamma0_value;
  rep.alpha_min = am.alpha_min;
  rep.mu_at_alpha_min = mu_lim;
  rep.b = b;
  rep.c0 = b - 0.5 * cs + mu_lim;
  rep.diagnostics.tail_fraction_of_mu = m3.tail_fraction;
  rep.diagnostics.extrapolation_spread = std::abs(mu_lim - mu3);
  rep.diagnostics.alpha_min_minus_gamma0 = am.alpha_min - am.gamma0_value;
  return rep;
}

double mu_inverse_with_floor(const OperatorSpec& op, double target, double tol,
                             const OdeOptions& opts,
                             const AlphaMinResult& am) {
  const double cs = c_star(op);
  const double mu_quad = std::min(1e-12, 1e-3 * tol);

  const double lo = am.alpha_min + 1e-6 * std::max(1.0, cs);
  const double mu_lo = mu(op, lo, mu_quad, opts);
  if (target < mu_lo - tol)
    throw RangeError("target below the range of mu: mu(alpha_min^+)=" +
                     std::to_string(mu_lo));
  if (target <= mu_lo) return lo;

  double hi = std::max({2.0 * lo, cs, 1.0});
  int doublings = 0;
  while (mu(op, hi, mu_quad, opts) < target) {
    hi *= 2.0;
    if (++doublings > 200)
      throw RangeError("mu bracket did not close under doubling");
  }
  auto f = [&](double a) { return mu(op, a, mu_quad, opts) - target; };
  const auto res =
      solve_bracketed_root(f, lo, hi, tol * std::max(1.0, std::abs(hi)));
  return res.root;
}

} // namespace

ThresholdReport c0(const OperatorSpec& op, double b, double tol,
                   const OdeOptions& opts) {
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  const AlphaMinResult am = alpha_min(op, std::min(tol, 1e-10), opts);
  return c0_with_floor(op, b, tol, opts, am);
}

double mu_inverse(const OperatorSpec& op, double target, double tol,
                  const OdeOptions& opts) {
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  const AlphaMinResult am = alpha_min(op, std::min(tol, 1e-10), opts);
  return mu_inverse_with_floor(op, target, tol, opts, am);
}

ExistenceVerdict classify_existence(const OperatorSpec& op, double b, double c,
                                    double tol, const OdeOptions& opts) {
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  // One admissibility-floor computation shared by the threshold and the
  // inverse solve; both are dominated by it for stiff operators.
  const AlphaMinResult am = alpha_min(op, std::min(tol, 1e-10), opts);
  const ThresholdReport th = c0_with_floor(op, b, tol, opts, am);
  const double cs = c_star(op);

  ExistenceVerdict v;
  v.b = b;
  v.c = c;
  v.c0 = th.c0;
  v.margin = c - th.c0;
  v.exists = (c >= th.c0 - tol);
  if (!v.exists) return v;

  const double mu_target = c - b + 0.5 * cs;
  if (mu_target <= th.mu_at_alpha_min) {
    // At (or numerically below) the boundary value: clamp to the floor.
    v.alpha = th.alpha_min;
    v.has_alpha = true;
    return v;
  }
  try {
    v.alpha = mu_inverse_with_floor(op, mu_target, tol, opts, am);
  } catch (const RangeError&) {
    v.alpha = th.alpha_min;
  }
  v.has_alpha = true;
  return v;
}

} // namespace hessrad
