#include "hessrad/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hessrad/detail/quadrature.hpp"
#include "hessrad/errors.hpp"
#include "hessrad/g_profile.hpp"
#include "hessrad/roots.hpp"

namespace hessrad {

namespace {

constexpr double EPS = 2.220446049250313e-16;
constexpr double H_FLOOR = 1e-13;

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

struct StepResult {
  double y_new = 0.0;
  double f_new = 0.0;  // slope at the right end (FSAL stage)
  double err = 0.0;    // raw embedded error estimate
};

// One step for the autonomous scalar equation y' = f(y).
template <class F>
StepResult dopri5_step(const F& f, double y, double k1, double h) {
  const double k2 = f(y + h * (A21 * k1));
  const double k3 = f(y + h * (A31 * k1 + A32 * k2));
  const double k4 = f(y + h * (A41 * k1 + A42 * k2 + A43 * k3));
  const double k5 = f(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
  const double k6 =
      f(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
  StepResult out;
  out.y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
  out.f_new = f(out.y_new);
  out.err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 +
                 E7 * out.f_new);
  return out;
}

// One step for y' = f(x): the slope depends only on the independent
// variable, so the stages collapse to fixed abscissae (c7 = c6 = 1, and
// the second stage carries zero weight in both rows).
template <class F>
StepResult dopri5_step_x(const F& f, double x, double y, double k1,
                         double h) {
  const double k3 = f(x + C3 * h);
  const double k4 = f(x + C4 * h);
  const double k5 = f(x + C5 * h);
  const double k6 = f(x + h);
  StepResult out;
  out.y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
  out.f_new = k6;
  out.err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + (E6 + E7) * k6);
  return out;
}

// Cubic Hermite value on [x0, x1] with values y and slopes d.
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

void check_common(double alpha, const OdeOptions& opts) {
  if (!(alpha > 0.0))
    throw ParameterError("alpha must be positive, got " +
                         std::to_string(alpha));
  if (!(opts.tol >= 1e-13 && opts.tol <= 1e-6))
    throw ParameterError("ode tolerance must lie in [1e-13, 1e-6]");
}

// Right-hand side g(W) - W.
struct Rhs {
  const OperatorSpec& op;
  double tol;
  double cap;
  double operator()(double w) const { return g_eval(op, w, tol, cap) - w; }
};

double initial_f(const Rhs& rhs, double alpha) {
  try {
    return rhs(alpha);
  } catch (const Error& e) {
    throw AdmissibilityError(
        "alpha=" + std::to_string(alpha) +
        " is outside the admissible initial range: " + e.what());
  }
}

// Adaptive march in t from (t0, w0) until |W - c*| enters the tail band.
// Appends nodes to tr.nodes and records the tail handoff.
void march_t(const Rhs& rhs, double t0, double w0, double f0,
             Trajectory& tr) {
  const OdeOptions& o = tr.opts;
  const double cs = tr.cstar;
  const double tau = o.tail_eps * std::max(1.0, cs);
  const double floor = 16.0 * EPS * std::max({1.0, std::abs(w0), cs});
  // Error scale relative to the gap |W - c*|, with a hard factor below the
  // requested tolerance: downstream evaluation interpolates between nodes
  // with a cubic Hermite whose error is a few orders above the one-step
  // truncation error, so the per-step budget has to leave that headroom.
  auto scale_of = [&](double wv) {
    return 0.001 * o.tol * std::abs(wv - cs) + floor;
  };

  tr.nodes.push_back({t0, w0, f0});
  double t = t0, w = w0, f = f0;
  if (std::abs(w - cs) <= tau) {
    tr.t_switch = t;
    tr.delta_T = w - cs;
    return;
  }

  double h = std::clamp(
      0.01 * std::max(std::abs(w - cs), tau) / std::max(std::abs(f), 1e-30),
      1e-10, 0.1);
  double errold = 1.0;

  while (tr.steps + tr.rejected < o.max_steps) {
    if (t + h > o.t_max) h = o.t_max - t;
    bool stage_failed = false;
    StepResult st;
    try {
      st = dopri5_step(rhs, w, f, h);
    } catch (const Error&) {
      stage_failed = true;  // a trial stage left the admissible range
    }
    const bool crossed =
        !stage_failed && (st.y_new - cs) * (w - cs) < 0.0;
    const double err =
        stage_failed ? 2.0 : std::abs(st.err) / scale_of(st.y_new);
    if (err <= 1.0 && !crossed) {
      t += h;
      w = st.y_new;
      f = st.f_new;
      tr.nodes.push_back({t, w, f});
      ++tr.steps;
      if (std::abs(w - cs) <= tau) break;
      if (t >= o.t_max)
        throw NonConvergenceError(
            "trajectory failed to reach the tail band by t_max");
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.17) *
                   std::pow(errold, 0.04);
      h = std::min(h * std::clamp(fac, 0.2, 5.0), 1.0);
      errold = std::max(err, 1e-10);
    } else {
      ++tr.rejected;
      if (crossed || stage_failed)
        h *= 0.5;
      else
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < H_FLOOR) {
        if (t - t0 < 0.1)
          throw StiffStartError(
              "step size underflow near t=0; the start slope is too steep "
              "for the t-march, use the W-parametrized start");
        throw NonConvergenceError("step size underflow mid-trajectory");
      }
    }
  }
  if (tr.steps + tr.rejected >= o.max_steps)
    throw NonConvergenceError("trajectory exceeded the step budget");
  tr.t_switch = t;
  tr.delta_T = w - cs;
}

Trajectory make_base(const OperatorSpec& op, double alpha,
                     const OdeOptions& opts) {
  Trajectory tr;
  tr.op = op;
  tr.alpha = alpha;
  tr.cstar = c_star(op);
  tr.opts = opts;
  if (alpha < tr.cstar)
    tr.monotone_dir = MonotoneDir::Increasing;
  else if (alpha > tr.cstar)
    tr.monotone_dir = MonotoneDir::Decreasing;
  else
    tr.monotone_dir = MonotoneDir::Constant;
  return tr;
}

} // namespace

double Trajectory::k_tail() const {
  return delta_T * std::exp(static_cast<double>(op.n) * t_switch);
}

Trajectory integrate_W(const OperatorSpec& op, double alpha,
                       const OdeOptions& opts) {
  check_common(alpha, opts);
  Trajectory tr = make_base(op, alpha, opts);
  const Rhs rhs{op, std::min(1e-12, 0.1 * opts.tol), opts.blowup_cap};
  const double f0 = initial_f(rhs, alpha);
  march_t(rhs, 0.0, alpha, f0, tr);
  return tr;
}

Trajectory integrate_W_stiff_start(const OperatorSpec& op, double alpha,
                                   const OdeOptions& opts) {
  check_common(alpha, opts);
  Trajectory tr = make_base(op, alpha, opts);
  const Rhs rhs{op, std::min(1e-12, 0.1 * opts.tol), opts.blowup_cap};
  const double f0 = initial_f(rhs, alpha);
  if (!(alpha < tr.cstar) || std::abs(f0) <= opts.slope_cap) {
    // Slope cap never hit: the plain integrator owns the whole range.
    march_t(rhs, 0.0, alpha, f0, tr);
    return tr;
  }

  // March t as a function of W: dt/dW = 1/(g(W)-W). The slope depends only
  // on W (the independent variable here), so each step is a pure quadrature
  // panel. F = g - W is strictly decreasing in W, hence stays above the
  // handoff threshold on the whole marched range. The error scale is 100x
  // tighter than the t-march so the cubic Hermite reconstruction of t(W)
  // (fourth order in the step) stays inside the dense-output budget even
  // where F is steep.
  auto inv = [&](double w) { return 1.0 / rhs(w); };
  const double handoff = 0.5 * opts.slope_cap;
  double w = alpha, t = 0.0, f = f0, slope = 1.0 / f0;
  tr.stiff.push_back({t, w, f});
  double h = 0.05 * (tr.cstar - alpha);
  double errold = 1.0;
  while (tr.steps + tr.rejected < opts.max_steps) {
    h = std::min(h, 0.25 * (tr.cstar - w));
    const StepResult st = dopri5_step_x(inv, w, t, slope, h);
    const double sc =
        0.01 * opts.tol * (std::abs(t) + std::abs(h * slope)) + 1e-30;
    const double err = std::abs(st.err) / sc;
    if (err <= 1.0) {
      w += h;
      t = st.y_new;
      slope = st.f_new;
      f = 1.0 / slope;
      tr.stiff.push_back({t, w, f});
      ++tr.steps;
      if (std::abs(f) <= handoff) break;
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.17) *
                   std::pow(errold, 0.04);
      h *= std::clamp(fac, 0.2, 5.0);
      errold = std::max(err, 1e-10);
    } else {
      ++tr.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < 1e-300)
        throw NonConvergenceError(
            "step underflow in the W-parametrized start");
    }
  }
  if (tr.steps + tr.rejected >= opts.max_steps)
    throw NonConvergenceError("W-parametrized start exceeded the step budget");

  march_t(rhs, t, w, f, tr);
  return tr;
}

Trajectory integrate_auto(const OperatorSpec& op, double alpha,
                          const OdeOptions& opts) {
  check_common(alpha, opts);
  const Rhs rhs{op, std::min(1e-12, 0.1 * opts.tol), opts.blowup_cap};
  const double cs = c_star(op);
  const double f0 = initial_f(rhs, alpha);
  if (alpha < cs && std::abs(f0) > opts.slope_cap)
    return integrate_W_stiff_start(op, alpha, opts);
  try {
    return integrate_W(op, alpha, opts);
  } catch (const StiffStartError&) {
    if (alpha < cs) return integrate_W_stiff_start(op, alpha, opts);
    throw;
  }
}

namespace {

double tail_value(const Trajectory& tr, double t) {
  return tr.cstar + tr.delta_T * std::exp(-static_cast<double>(tr.op.n) *
                                          (t - tr.t_switch));
}

// Index i with v[i].t <= t < v[i+1].t (clamped to the ends).
size_t find_interval(const std::vector<TrajNode>& v, double t) {
  size_t lo = 0, hi = v.size() - 1;
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (v[mid].t <= t)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// Solves t(w) = t_query on a stiff interval, where t(w) is the cubic
// Hermite with values t and slopes 1/f. Safeguarded Newton.
double invert_stiff(const TrajNode& a, const TrajNode& b, double t_query) {
  auto tval = [&](double w) {
    return hermite(a.w, a.t, 1.0 / a.f, b.w, b.t, 1.0 / b.f, w);
  };
  double wlo = a.w, whi = b.w;
  double w = 0.5 * (wlo + whi);
  for (int it = 0; it < 80; ++it) {
    const double tv = tval(w);
    if (tv < t_query)
      wlo = w;
    else
      whi = w;
    const double deriv =
        hermite_deriv(a.w, a.t, 1.0 / a.f, b.w, b.t, 1.0 / b.f, w);
    double w_next = w - (tv - t_query) / deriv;
    if (!(w_next > wlo && w_next < whi)) w_next = 0.5 * (wlo + whi);
    if (std::abs(w_next - w) <= 4.0 * EPS * std::max(1.0, std::abs(w))) {
      w = w_next;
      break;
    }
    w = w_next;
  }
  return w;
}

} // namespace

double W_at(const Trajectory& tr, double r) {
  if (!(r >= 1.0 - 1e-12))
    throw ParameterError("W_at requires r >= 1, got " + std::to_string(r));
  const double t = std::log(std::max(r, 1.0));
  if (t >= tr.t_switch) return tail_value(tr, t);
  if (!tr.stiff.empty() && t <= tr.stiff.back().t) {
    if (t <= 0.0) return tr.alpha;
    const size_t i = find_interval(tr.stiff, t);
    return invert_stiff(tr.stiff[i], tr.stiff[i + 1], t);
  }
  const auto& v = tr.nodes;
  if (v.size() < 2) return tail_value(tr, t);
  const size_t i = find_interval(v, t);
  return hermite(v[i].t, v[i].w, v[i].f, v[i + 1].t, v[i + 1].w, v[i + 1].f,
                 t);
}

double W_deriv_at(const Trajectory& tr, double r) {
  if (!(r >= 1.0 - 1e-12))
    throw ParameterError("W_deriv_at requires r >= 1");
  const double t = std::log(std::max(r, 1.0));
  const double n = static_cast<double>(tr.op.n);
  if (t >= tr.t_switch)
    return -n * tr.delta_T * std::exp(-n * (t - tr.t_switch));
  if (!tr.stiff.empty() && t <= tr.stiff.back().t) {
    const size_t i = find_interval(tr.stiff, std::max(t, 0.0));
    const auto& a = tr.stiff[i];
    const auto& b = tr.stiff[i + 1];
    const double w = (t <= 0.0) ? tr.alpha : invert_stiff(a, b, t);
    const double dtdw =
        hermite_deriv(a.w, a.t, 1.0 / a.f, b.w, b.t, 1.0 / b.f, w);
    return 1.0 / dtdw;
  }
  const auto& v = tr.nodes;
  if (v.size() < 2) return 0.0;
  const size_t i = find_interval(v, t);
  return hermite_deriv(v[i].t, v[i].w, v[i].f, v[i + 1].t, v[i + 1].w,
                       v[i + 1].f, t);
}

double dW_dalpha(const Trajectory& tr, double r, double quad_tol) {
  if (!(r >= 1.0 - 1e-12))
    throw ParameterError("dW_dalpha requires r >= 1");
  const double t_end = std::log(std::max(r, 1.0));
  if (t_end == 0.0) return 1.0;
  const OperatorSpec& op = tr.op;
  const double gp_tol = 1e-12;
  double total = 0.0;

  // Stiff prefix, integrated in the W variable:
  //   (g'(W) - 1) dt = (g'(W) - 1) / (g(W) - W) dW.
  double t_lo = 0.0;
  if (!tr.stiff.empty() && tr.stiff.back().t > 0.0) {
    const double t_se = tr.stiff.back().t;
    const double w_hi =
        (t_end >= t_se) ? tr.stiff.back().w : W_at(tr, std::exp(t_end));
    total += detail::adaptive_gauss(
        [&](double w) {
          return (g_prime(op, w, gp_tol) - 1.0) /
                 (g_eval(op, w, gp_tol, tr.opts.blowup_cap) - w);
        },
        tr.alpha, w_hi, 0.25 * quad_tol);
    if (t_end <= t_se) return std::exp(total);
    t_lo = t_se;
  }

  // Regular segment in t.
  const double t_mid_end = std::min(t_end, tr.t_switch);
  if (t_mid_end > t_lo) {
    total += detail::adaptive_gauss(
        [&](double s) {
          return g_prime(op, W_at(tr, std::exp(s)), gp_tol) - 1.0;
        },
        t_lo, t_mid_end, 0.5 * quad_tol);
  }

  // In the tail, g'(W) - 1 = -n up to O(delta_T).
  if (t_end > tr.t_switch)
    total += -static_cast<double>(op.n) * (t_end - tr.t_switch);
  return std::exp(total);
}

double dW_dalpha(const OperatorSpec& op, double alpha, double r,
                 const OdeOptions& opts, double quad_tol) {
  const Trajectory tr = integrate_auto(op, alpha, opts);
  return dW_dalpha(tr, r, quad_tol);
}

double W_inverse_in_alpha(const OperatorSpec& op, double r, double target,
                          double alpha_lo, double root_tol,
                          const OdeOptions& opts) {
  if (!(r >= 1.0 - 1e-12))
    throw ParameterError("W_inverse_in_alpha requires r >= 1");
  if (!(root_tol > 0.0)) throw ParameterError("root_tol must be positive");
  auto h = [&](double a) {
    return W_at(integrate_auto(op, a, opts), r) - target;
  };
  const double h_lo = h(alpha_lo);
  if (h_lo > 0.0)
    throw RangeError(
        "target lies below the attainable range of W at this radius");
  if (h_lo == 0.0) return alpha_lo;
  double hi = std::max({c_star(op), target, 2.0 * alpha_lo, 1.0});
  int doublings = 0;
  while (h(hi) < 0.0) {
    hi *= 2.0;
    if (++doublings > 60)
      throw RangeError("target not bracketed in alpha after doubling");
  }
  const auto res = solve_bracketed_root(
      h, alpha_lo, hi, root_tol * std::max(1.0, std::abs(target)));
  return res.root;
}

double W_inverse_in_alpha(const OperatorSpec& op, double r, double target,
                          double root_tol, const OdeOptions& opts) {
  const auto g0 = gamma0(op, std::min(1e-10, root_tol), opts.blowup_cap);
  const double floor = g0.gamma0 + 2.0 * g0.enclosure;
  return W_inverse_in_alpha(op, r, target, floor, root_tol, opts);
}

} // namespace hessrad
