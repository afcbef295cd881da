#include "hessrad/g_profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hessrad/detail/numeric.hpp"
#include "hessrad/errors.hpp"
#include "hessrad/roots.hpp"

namespace hessrad {

namespace {

// Locates the cone boundary in beta at fixed gamma by bisection on
// in_cone_ray. Returns the boundary estimate (just outside) and its width.
RootResult cone_boundary_beta(const OperatorSpec& op, double gamma) {
  if (!in_cone_ray(op, {1.0, gamma}))
    throw OutsideDomainError("no cone slice at gamma=" +
                             std::to_string(gamma) + " for " + op.label);
  double lo = -1.0;
  while (in_cone_ray(op, {lo, gamma})) {
    lo *= 2.0;
    if (lo < -1e12)
      throw NoBracketError("cone boundary in beta not found above -1e12");
  }
  return bisect_predicate(
      [&](double b) { return !in_cone_ray(op, {b, gamma}); }, lo, 1.0,
      1e-14 * std::max(1.0, std::abs(lo)));
}

} // namespace

double g_eval(const OperatorSpec& op, double gamma, double tol,
              double blowup_cap) {
  if (!(gamma > 0.0))
    throw OutsideDomainError("profile requires gamma > 0, got gamma=" +
                             std::to_string(gamma));
  if (!(tol > 0.0)) throw ParameterError("g_eval tolerance must be positive");

  auto h = [&](double beta) { return eval_ray(op, {beta, gamma}) - 1.0; };

  // Lower bracket end just inside the cone boundary, where f is near 0.
  const auto edge = cone_boundary_beta(op, gamma);
  const double width =
      std::max(edge.enclosure, 4e-16 * std::max(1.0, std::abs(edge.root)));
  double lo = edge.root + 2.0 * width;
  while (!in_cone_ray(op, {lo, gamma})) lo += width;
  double flo = h(lo);
  for (int i = 0; i < 80 && flo >= 0.0; ++i) {
    // Thin slice: creep geometrically toward the boundary until f < 1.
    lo = edge.root + 0.5 * (lo - edge.root);
    if (!in_cone_ray(op, {lo, gamma})) break;
    flo = h(lo);
  }
  if (flo >= 0.0)
    throw NoBracketError("could not find f < 1 near the cone boundary at "
                         "gamma=" + std::to_string(gamma));

  // Upper end: double until f > 1 or the cap rules an admissible root out.
  double hi = std::max({1.0, gamma, 2.0 * std::abs(lo)});
  while (h(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 4.0 * blowup_cap)
      throw DivergenceError(
          "profile exceeds the blowup cap at gamma=" + std::to_string(gamma) +
          " (no admissible root below " + std::to_string(blowup_cap) + ")");
  }

  const double root_tol = tol * std::max(1.0, hi);
  const auto res = solve_bracketed_root(h, lo, hi, root_tol);
  if (res.root > blowup_cap)
    throw DivergenceError("profile exceeds the blowup cap at gamma=" +
                          std::to_string(gamma));
  return res.root;
}

double g_prime(const OperatorSpec& op, double gamma, double tol) {
  const double g = g_eval(op, gamma, tol);
  const RayPartials d = ray_partials(op, {g, gamma});
  if (!(d.dfdbeta > 0.0))
    throw DomainError("dfdbeta must be positive on the profile");
  return -d.dfdgamma / d.dfdbeta;
}

Gamma0Result gamma0(const OperatorSpec& op, double tol, double blowup_cap) {
  if (!(tol > 0.0)) throw ParameterError("gamma0 tolerance must be positive");
  const double cs = c_star(op);
  auto blown_up = [&](double gamma) {
    if (gamma <= 0.0) return true;
    try {
      (void)g_eval(op, gamma, 1e-12, blowup_cap);
      return false;
    } catch (const Error&) {
      return true;
    }
  };
  if (blown_up(cs))
    throw NonConvergenceError("profile unexpectedly blows up at c*");
  const auto res = bisect_predicate(blown_up, 0.0, cs, tol * std::max(1.0, cs));
  Gamma0Result out;
  out.gamma0 = res.root;
  out.enclosure = std::max(res.enclosure, 1e-15 * std::max(1.0, cs));
  // Certify the endpoint: just above it the profile must be finite (that the
  // bisection established) and still close to the cap. When the endpoint is
  // indistinguishable from 0 at this tolerance the cap-proximity check is
  // vacuous and skipped.
  if (out.gamma0 > 4.0 * out.enclosure) {
    const double g_above =
        g_eval(op, out.gamma0 + out.enclosure, 1e-12, blowup_cap);
    if (g_above < 0.5 * blowup_cap)
      throw NonConvergenceError(
          "gamma0 certification failed: profile is not near the cap just "
          "above the located endpoint");
  }
  return out;
}

GProfile build_g_profile(const OperatorSpec& op, int grid_size, double tol) {
  if (grid_size < 16)
    throw ParameterError("grid_size must be at least 16, got " +
                         std::to_string(grid_size));
  GProfile prof;
  prof.op = op;
  prof.c_star = c_star(op);
  const auto g0 = gamma0(op, 1e-10);
  prof.gamma0 = g0.gamma0;
  prof.gamma0_tol = g0.enclosure;

  const double start = std::max(prof.gamma0 * (1.0 + 1e-6) + 1e-12,
                                prof.gamma0 + 2.0 * g0.enclosure);
  const double stop = std::max(10.0 * prof.c_star, 10.0);
  if (!(start < stop))
    throw ParameterError("empty profile range: start >= Gamma_max");
  prof.gamma = detail::geomspace(start, stop, grid_size);
  prof.g.resize(prof.gamma.size());
  prof.gprime.resize(prof.gamma.size());
  for (size_t i = 0; i < prof.gamma.size(); ++i) {
    prof.g[i] = g_eval(op, prof.gamma[i], tol);
    prof.gprime[i] = g_prime(op, prof.gamma[i], tol);
  }

  if (!(prof.gamma0 >= 0.0 && prof.gamma0 < prof.c_star))
    throw NonConvergenceError("gamma0 outside [0, c*)");
  const double g_at_cs = g_eval(op, prof.c_star, tol);
  if (std::abs(g_at_cs - prof.c_star) > 1e-10 * std::max(1.0, prof.c_star))
    throw NonConvergenceError("profile fails g(c*) = c*");
  for (size_t i = 0; i < prof.gamma.size(); ++i) {
    if (!(prof.gprime[i] < 0.0))
      throw NonConvergenceError("profile slope must be negative");
    if (!(prof.g[i] > (1.0 - op.n) * prof.gamma[i]))
      throw NonConvergenceError("profile violates the line bound");
    if (i > 0 && !(prof.g[i] < prof.g[i - 1]))
      throw NonConvergenceError("profile table not strictly decreasing");
  }
  return prof;
}

double g_eval(const GProfile& profile, double gamma, double tol) {
  if (gamma <= profile.gamma0 + profile.gamma0_tol)
    throw OutsideDomainError(
        "gamma is at or below the certified blowup endpoint");
  return g_eval(profile.op, gamma, tol);
}

double g_prime(const GProfile& profile, double gamma, double tol) {
  if (gamma <= profile.gamma0 + profile.gamma0_tol)
    throw OutsideDomainError(
        "gamma is at or below the certified blowup endpoint");
  return g_prime(profile.op, gamma, tol);
}

} // namespace hessrad
