#include "verify_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "hessrad/asymptotics.hpp"
#include "hessrad/detail/numeric.hpp"
#include "hessrad/errors.hpp"
#include "hessrad/g_profile.hpp"
#include "hessrad/oracles.hpp"
#include "hessrad/radial_solution.hpp"
#include "hessrad/roots.hpp"
#include "hessrad/trajectory.hpp"

namespace hessrad::verify {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// g' < 0, convexity via second divided differences, the linear lower bound
// g > (1-n) gamma, and the slope identity g'(c*) = 1-n by central
// differencing. Shared between both operator families; only the grid start
// differs (the quotient domain begins at its pole).
CheckRow structure_row(const OperatorSpec& op, const SuiteOptions& so) {
  const double cs = c_star(op);
  const auto g0 = gamma0(op, std::min(so.root_tol, 1e-10));
  const double lo = g0.gamma0 + 0.02 * (cs - g0.gamma0);
  const auto grid = detail::geomspace(lo, 10.0 * cs, 48);

  bool ok = true;
  std::vector<double> gv(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    gv[i] = g_eval(op, grid[i]);
    if (!(g_prime(op, grid[i]) < 0.0)) ok = false;
    if (!(gv[i] > (1.0 - op.n) * grid[i])) ok = false;
  }
  for (size_t i = 0; i + 2 < grid.size(); ++i) {
    const double s1 = (gv[i + 1] - gv[i]) / (grid[i + 1] - grid[i]);
    const double s2 = (gv[i + 2] - gv[i + 1]) / (grid[i + 2] - grid[i + 1]);
    if (!(2.0 * (s2 - s1) / (grid[i + 2] - grid[i]) > 0.0)) ok = false;
  }

  const double slope = oracles::finite_diff(
      [&](double x) { return g_eval(op, x); }, cs, 1e-6, 1);
  const double dev = std::abs(slope - (1.0 - op.n));
  if (!(dev < 1e-6)) ok = false;
  return {op.label, "g_structure", ok, fmt("slope_dev=%.3e", dev)};
}

CheckRow residual_row(const OperatorSpec& op, const SuiteOptions& so) {
  OdeOptions ode;
  ode.tol = so.ode_tol;
  const double cs = c_star(op);
  const auto sol =
      assemble_solution(op, 2.0 * cs, 0.0, 1e3, 256, ode, so.quad_tol);
  const auto rep = residual_report(op, sol);
  const bool ok = rep.max_residual < 1e-8 && rep.cone_violations == 0 &&
                  std::abs(rep.decay_slope - rep.decay_expected) < 0.1;
  return {op.label, "solution_residual", ok,
          fmt("res=%.3e slope_dev=%.3e", rep.max_residual,
              std::abs(rep.decay_slope - rep.decay_expected))};
}

std::vector<CheckRow> sigma_checks(const OperatorSpec& op,
                                   const SuiteOptions& so) {
  std::vector<CheckRow> rows;
  OdeOptions ode;
  ode.tol = so.ode_tol;
  const double cs = c_star(op);
  const auto orc = oracles::make_sigma_oracle(op.n, op.k);

  {
    auto f = [&](double c) { return eval_ray(op, {c, c}) - 1.0; };
    const auto res = solve_bracketed_root(f, 1e-3, 10.0, 1e-13);
    const double dev = std::abs(res.root - cs);
    rows.push_back({op.label, "cstar_root", dev < 1e-12, fmt("dev=%.3e", dev)});
  }
  {
    double worst = 0.0;
    for (double gm : detail::geomspace(1e-4, 10.0 * cs, 64)) {
      const double num = g_eval(op, gm, 1e-12, 1e18);
      const double ref = oracles::oracle_g(op, gm);
      worst = std::max(worst,
                       std::abs(num - ref) / std::max(1.0, std::abs(ref)));
    }
    rows.push_back(
        {op.label, "g_closed_form", worst < 1e-10, fmt("worst=%.3e", worst)});
  }
  rows.push_back(structure_row(op, so));
  {
    double worst = 0.0;
    for (double a : {0.5 * cs, 2.0 * cs}) {
      const auto tr = integrate_auto(op, a, ode);
      for (double r : detail::geomspace(1.0, 100.0, 128))
        worst = std::max(
            worst, std::abs(W_at(tr, r) - oracles::oracle_W(orc, a, r)));
    }
    rows.push_back({op.label, "trajectory_vs_closed_form", worst < 1e-8,
                    fmt("sup=%.3e", worst)});
  }
  {
    double worst = 0.0;
    for (double a : {0.5 * cs, 2.0 * cs}) {
      const double m = mu(op, a, std::min(so.quad_tol, 1e-10), ode);
      worst = std::max(worst, std::abs(m - oracles::oracle_mu(orc, a, 1e-10)));
    }
    rows.push_back(
        {op.label, "mu_vs_oracle", worst < 1e-7, fmt("worst=%.3e", worst)});
  }
  {
    const auto th = c0(op, 0.0, std::min(so.root_tol, 1e-9), ode);
    const double ref = oracles::oracle_threshold_constant(orc, 0.0, 1e-13);
    const double dev = std::abs(th.c0 - ref);
    rows.push_back(
        {op.label, "threshold_vs_oracle", dev < 1e-6, fmt("dev=%.3e", dev)});
  }
  {
    double worst = 0.0;
    for (double y : {0.5, 2.0}) {
      const double a = mu_inverse(op, y, so.root_tol, ode);
      worst = std::max(worst, std::abs(mu(op, a, 1e-12, ode) - y));
    }
    rows.push_back(
        {op.label, "mu_roundtrip", worst < 1e-8, fmt("worst=%.3e", worst)});
  }
  rows.push_back(residual_row(op, so));
  return rows;
}

std::vector<CheckRow> quotient_checks(const OperatorSpec& op,
                                      const SuiteOptions& so) {
  std::vector<CheckRow> rows;
  const double cs = c_star(op);
  {
    const double dev = std::abs(eval_ray(op, {cs, cs}) - 1.0);
    rows.push_back(
        {op.label, "cstar_diagonal", dev < 1e-12, fmt("dev=%.3e", dev)});
  }
  rows.push_back(structure_row(op, so));
  {
    // The domain endpoint must sit just above the pole of the closed-form
    // quotient profile, gamma_crit = (C(n-1,l-1)/C(n-1,k-1))^(1/(k-l)).
    const auto g0 = gamma0(op, std::min(so.root_tol, 1e-10));
    const double gcrit =
        std::pow(detail::binom(op.n - 1, op.l - 1) /
                     detail::binom(op.n - 1, op.k - 1),
                 1.0 / static_cast<double>(op.k - op.l));
    const double gap = g0.gamma0 - gcrit;
    const bool ok = gap >= -g0.enclosure && gap < 1e-6;
    rows.push_back(
        {op.label, "gamma0_vs_pole", ok, fmt("gap=%.3e", gap)});
  }
  rows.push_back(residual_row(op, so));
  return rows;
}

std::vector<CheckRow> checked(const OperatorSpec& op, const SuiteOptions& so) {
  try {
    return check_operator(op, so);
  } catch (const Error& e) {
    return {{op.label, "suite", false, std::string("error: ") + e.what()}};
  }
}

} // namespace

std::vector<CheckRow> check_operator(const OperatorSpec& op,
                                     const SuiteOptions& opts) {
  return op.family == Family::SigmaK ? sigma_checks(op, opts)
                                     : quotient_checks(op, opts);
}

std::vector<OperatorSpec> default_operator_set() {
  std::vector<OperatorSpec> ops;
  for (auto [n, k] : {std::pair{3, 2}, {3, 3}, {4, 2}, {4, 3}, {4, 4},
                      {5, 2}, {5, 3}, {5, 5}})
    ops.push_back(make_operator(Family::SigmaK, n, k));
  ops.push_back(make_operator(Family::HessianQuotient, 4, 3, 1));
  ops.push_back(make_operator(Family::HessianQuotient, 5, 4, 2));
  return ops;
}

SuiteReport run_suite(const std::vector<OperatorSpec>& ops,
                      const SuiteOptions& opts) {
  std::vector<std::vector<CheckRow>> per(ops.size());
  if (opts.parallel) {
    std::vector<std::future<std::vector<CheckRow>>> futs;
    futs.reserve(ops.size());
    for (const auto& op : ops)
      futs.push_back(std::async(std::launch::async,
                                [op, opts] { return checked(op, opts); }));
    for (size_t i = 0; i < futs.size(); ++i) per[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < ops.size(); ++i) per[i] = checked(ops[i], opts);
  }

  SuiteReport rep;
  for (auto& rows : per)
    for (auto& row : rows) {
      rep.any_failed = rep.any_failed || !row.pass;
      rep.rows.push_back(std::move(row));
    }
  return rep;
}

std::string format_report(const SuiteReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-27s %-6s %s\n", "operator",
                "check", "result", "detail");
  out << line;
  int failed = 0;
  for (const auto& r : report.rows) {
    failed += r.pass ? 0 : 1;
    std::snprintf(line, sizeof line, "%-12s %-27s %-6s %s\n", r.op.c_str(),
                  r.check.c_str(), r.pass ? "pass" : "FAIL",
                  r.detail.c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "%zu checks, %d failed\n",
                report.rows.size(), failed);
  out << line;
  return out.str();
}

} // namespace hessrad::verify
