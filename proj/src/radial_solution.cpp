#include "hessrad/radial_solution.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hessrad/detail/numeric.hpp"
#include "hessrad/detail/quadrature.hpp"
#include "hessrad/errors.hpp"
#include "hessrad/g_profile.hpp"

namespace hessrad {

RadialSolution assemble_solution(const OperatorSpec& op, double alpha,
                                 double b, double r_out, int points,
                                 const OdeOptions& opts, double quad_tol) {
  if (!(r_out >= 10.0))
    throw ParameterError("r_out must be >= 10, got " + std::to_string(r_out));
  if (points < 16)
    throw ParameterError("points must be >= 16, got " +
                         std::to_string(points));
  if (!(quad_tol > 0.0)) throw ParameterError("quad_tol must be positive");

  RadialSolution sol;
  sol.op = op;
  sol.alpha = alpha;
  sol.b = b;
  sol.cstar = c_star(op);
  sol.traj = integrate_auto(op, alpha, opts);
  const auto g0 = gamma0(op, 1e-10, opts.blowup_cap);
  sol.gamma0 = g0.gamma0;
  sol.gamma0_enclosure = g0.enclosure;
  sol.mu_value = mu_detailed(sol.traj, std::min(quad_tol, 1e-12)).mu;
  sol.c = b - 0.5 * sol.cstar + sol.mu_value;

  sol.r = detail::geomspace(1.0, r_out, points);
  sol.u.resize(points);
  sol.uprime.resize(points);
  sol.usecond.resize(points);

  const double ge_tol = 1e-12;
  auto integrand = [&](double t) {
    return std::exp(2.0 * t) * W_at(sol.traj, std::exp(t));
  };

  double acc = b;
  double t_prev = 0.0;
  for (int i = 0; i < points; ++i) {
    const double ri = sol.r[i];
    const double ti = std::log(ri);
    if (i > 0) {
      const double tol_i = quad_tol *
                           std::max(1.0, 0.5 * sol.cstar * std::exp(2.0 * ti)) /
                           64.0;
      acc += detail::adaptive_gauss(integrand, t_prev, ti, tol_i);
    }
    const double wi = W_at(sol.traj, ri);
    sol.u[i] = acc;
    sol.uprime[i] = ri * wi;
    sol.usecond[i] = g_eval(op, wi, ge_tol, opts.blowup_cap);
    t_prev = ti;
  }
  return sol;
}

ResidualReport residual_report(const OperatorSpec& op,
                               const RadialSolution& sol) {
  if (sol.r.size() < 2 || sol.r.size() != sol.u.size() ||
      sol.r.size() != sol.uprime.size() || sol.r.size() != sol.usecond.size())
    throw ParameterError("solution grid is empty or inconsistently sized");

  const size_t m = sol.r.size();
  const int n = op.n;
  ResidualReport rep;
  rep.decay_expected = 2.0 - static_cast<double>(n);

  for (size_t i = 0; i < m; ++i) {
    const double gamma = sol.uprime[i] / sol.r[i];
    const RayPoint p{sol.usecond[i], gamma};
    const double res = std::abs(eval_ray(op, p) - 1.0);
    rep.max_residual = std::max(rep.max_residual, res);
    if (gamma <= 0.0 || !in_cone_ray(op, p)) ++rep.cone_violations;
  }

  const double R = sol.r.back();
  const double WR = sol.uprime.back() / R;
  rep.c_estimate = sol.u.back() - 0.5 * sol.cstar * R * R +
                   (WR - sol.cstar) * R * R / (static_cast<double>(n) - 2.0);
  rep.c_error = std::abs(rep.c_estimate - sol.c);

  // Decay exponent of the expansion remainder u - (c*/2 r^2 + c) over the
  // outer half of the grid. Points whose remainder sits at the rounding
  // floor of the cumulative quadrature are excluded; when nothing usable
  // is left (alpha = c* makes the remainder identically zero) the slope is
  // reported at its theoretical value with the flag set.
  std::vector<double> xs, ys;
  for (size_t i = m / 2; i < m; ++i) {
    const double rem =
        sol.u[i] - (0.5 * sol.cstar * sol.r[i] * sol.r[i] + sol.c);
    const double floor_i = 1e-12 * std::max(1.0, std::abs(sol.u[i])) + 1e-13;
    if (std::abs(rem) > 10.0 * floor_i) {
      xs.push_back(std::log(sol.r[i]));
      ys.push_back(std::log(std::abs(rem)));
    }
  }
  if (xs.size() < 8) {
    rep.decay_slope = rep.decay_expected;
    rep.decay_noise_floored = true;
    return rep;
  }
  double xbar = 0.0, ybar = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= static_cast<double>(xs.size());
  ybar /= static_cast<double>(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
  }
  rep.decay_slope = sxy / sxx;
  return rep;
}

void export_solution(const RadialSolution& sol, const std::string& path,
                     const std::string& format) {
  if (format != "csv" && format != "json")
    throw ParameterError("unknown export format '" + format +
                         "' (expected csv or json)");
  if (sol.r.empty()) throw ParameterError("solution has no samples");

  std::vector<double> residual(sol.r.size());
  for (size_t i = 0; i < sol.r.size(); ++i) {
    const RayPoint p{sol.usecond[i], sol.uprime[i] / sol.r[i]};
    residual[i] = std::abs(eval_ray(sol.op, p) - 1.0);
  }

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  if (format == "csv") {
    out << "r,u,uprime,usecond,residual\n";
    for (size_t i = 0; i < sol.r.size(); ++i) {
      out << detail::fmt17(sol.r[i]) << ',' << detail::fmt17(sol.u[i]) << ','
          << detail::fmt17(sol.uprime[i]) << ','
          << detail::fmt17(sol.usecond[i]) << ','
          << detail::fmt17(residual[i]) << '\n';
    }
  } else {
    nlohmann::ordered_json j;
    j["operator"] = {
        {"family",
         sol.op.family == Family::SigmaK ? "sigma_k" : "hessian_quotient"},
        {"n", sol.op.n},
        {"k", sol.op.k},
        {"l", sol.op.l},
        {"label", sol.op.label}};
    j["alpha"] = sol.alpha;
    j["b"] = sol.b;
    j["c"] = sol.c;
    j["c_star"] = sol.cstar;
    j["gamma0"] = sol.gamma0;
    j["mu"] = sol.mu_value;
    j["samples"] = {{"r", sol.r},
                    {"u", sol.u},
                    {"uprime", sol.uprime},
                    {"usecond", sol.usecond},
                    {"residual", residual}};
    out << j.dump(2) << '\n';
  }
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

} // namespace hessrad
