#include "hessrad/oracles.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "hessrad/errors.hpp"

// Everything in this translation unit is computed from scratch: binomials,
// roots, and quadrature are local so that a defect in the solver pipeline
// cannot silently cancel against the same defect here.
namespace hessrad::oracles {

namespace {

double bin(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  long double v = 1.0L;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return static_cast<double>(v);
}

double kroot(double x, int k, const char* what) {
  if (x >= 0.0) return std::pow(x, 1.0 / static_cast<double>(k));
  if (k % 2 == 1) return -std::pow(-x, 1.0 / static_cast<double>(k));
  throw DomainError(std::string(what) +
                    ": negative radicand with even index " +
                    std::to_string(k));
}

// Double-exponential (tanh-sinh) quadrature on a finite panel [a, b].
// Levels halve the mesh until two successive estimates agree.
double tanh_sinh_panel(const std::function<double(double)>& f, double a,
                       double b, double tol) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double pi_2 = 1.5707963267948966;
  const double u_max = 4.0;

  auto term = [&](double u) {
    const double su = pi_2 * std::sinh(u);
    const double ch = std::cosh(su);
    const double x = mid + half * std::tanh(su);
    const double w = half * pi_2 * std::cosh(u) / (ch * ch);
    if (!(w > 0.0) || !std::isfinite(w)) return 0.0;
    const double fx = f(x);
    return std::isfinite(fx) ? w * fx : 0.0;
  };

  double h = 1.0;
  double sum = term(0.0);
  for (int i = 1; static_cast<double>(i) * h <= u_max; ++i)
    sum += term(i * h) + term(-i * h);
  double estimate = h * sum;

  for (int level = 1; level <= 11; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (int i = 1; static_cast<double>(i) * h <= u_max; i += 2)
      add += term(i * h) + term(-i * h);
    sum += add;
    const double next = h * sum;
    const double change = std::abs(next - estimate);
    estimate = next;
    if (level >= 3 && change <= std::max(tol, 1e-17 * std::abs(next)))
      break;
  }
  return estimate;
}

} // namespace

SigmaKOracle make_sigma_oracle(int n, int k) {
  if (n < 3)
    throw ParameterError("oracle requires n >= 3, got n=" + std::to_string(n));
  if (k < 2 || k > n)
    throw ParameterError("oracle requires 2 <= k <= n, got k=" +
                         std::to_string(k));
  SigmaKOracle o;
  o.n = n;
  o.k = k;
  o.a = std::pow(bin(n, k), -1.0 / static_cast<double>(k));
  return o;
}

double oracle_W(const SigmaKOracle& o, double alpha, double r) {
  if (!(r > 0.0)) throw ParameterError("oracle_W requires r > 0");
  const double ak = std::pow(o.a, o.k);
  const double alk = std::pow(alpha, o.k);
  const double radicand = ak + (alk - ak) * std::pow(r, -o.n);
  return kroot(radicand, o.k, "oracle_W");
}

double oracle_mu(const SigmaKOracle& o, double alpha, double tol) {
  // W(s) - a = a*((1 + y)^{1/k} - 1) with y = ((alpha/a)^k - 1) s^{-n}.
  // The expm1/log1p form keeps the difference accurate when y underflows
  // relative to 1; the naive kroot(a^k + ...) - a collapses to zero past
  // s ~ (y(1)/eps)^{1/n} and silently drops the tail of the integral.
  const double ratio = std::pow(alpha / o.a, o.k) - 1.0;
  const double invk = 1.0 / static_cast<double>(o.k);
  const double n = static_cast<double>(o.n);
  auto f = [&](double s) {
    const double y = ratio * std::pow(s, -n);
    return s * o.a * std::expm1(std::log1p(y) * invk);
  };
  return quad_improper(f, 1.0, 1.0 - n, tol);
}

double oracle_threshold_constant(const SigmaKOracle& o, double a_hat,
                                 double tol) {
  const double n = static_cast<double>(o.n);
  const double invk = 1.0 / static_cast<double>(o.k);
  // (1 - s^{-n})^{1/k} - 1 via expm1/log1p, same cancellation issue as in
  // oracle_mu. At s = 1 this evaluates expm1(-inf) = -1 which is the correct
  // limit of the integrand.
  auto f = [&](double s) {
    return s * std::expm1(std::log1p(-std::pow(s, -n)) * invk);
  };
  const double I = quad_improper(f, 1.0, 1.0 - n, tol);
  return a_hat - 0.5 * o.a + o.a * I;
}

double oracle_g(const OperatorSpec& op, double gamma) {
  const int n = op.n, k = op.k;
  if (op.family == Family::SigmaK) {
    if (!(gamma > 0.0))
      throw OutsideDomainError("closed-form g: gamma must exceed 0");
    const double Bk = bin(n - 1, k - 1);
    const double Kk = bin(n - 1, k);
    return (1.0 - Kk * std::pow(gamma, k)) / (Bk * std::pow(gamma, k - 1));
  }
  const int l = op.l;
  const double p = bin(n - 1, k - 1), q = bin(n - 1, l - 1);
  const double gcrit =
      std::pow(q / p, 1.0 / static_cast<double>(k - l));
  if (!(gamma > gcrit))
    throw OutsideDomainError(
        "closed-form g: gamma must exceed the quotient pole at " +
        std::to_string(gcrit));
  const double Al = bin(n - 1, l) * std::pow(gamma, l);
  const double Ak = bin(n - 1, k) * std::pow(gamma, k);
  const double Bk = p * std::pow(gamma, k - 1);
  const double Bl = q * std::pow(gamma, l - 1);
  return (Al - Ak) / (Bk - Bl);
}

double oracle_g_prime(const OperatorSpec& op, double gamma) {
  const int n = op.n, k = op.k;
  if (op.family == Family::SigmaK) {
    if (!(gamma > 0.0))
      throw OutsideDomainError("closed-form g': gamma must exceed 0");
    const double Bk = bin(n - 1, k - 1);
    const double Kk = bin(n - 1, k);
    return (1.0 - k) * std::pow(gamma, -k) / Bk - Kk / Bk;
  }
  const int l = op.l;
  const double a = bin(n - 1, l), bq = bin(n - 1, k);
  const double p = bin(n - 1, k - 1), q = bin(n - 1, l - 1);
  const double gcrit = std::pow(q / p, 1.0 / static_cast<double>(k - l));
  if (!(gamma > gcrit))
    throw OutsideDomainError(
        "closed-form g': gamma must exceed the quotient pole at " +
        std::to_string(gcrit));
  const double N = a * std::pow(gamma, l) - bq * std::pow(gamma, k);
  const double D = p * std::pow(gamma, k - 1) - q * std::pow(gamma, l - 1);
  const double Np = a * l * std::pow(gamma, l - 1) -
                    bq * k * std::pow(gamma, k - 1);
  const double Dp = p * (k - 1) * std::pow(gamma, k - 2) -
                    q * (l - 1) * std::pow(gamma, l - 2);
  return (Np * D - N * Dp) / (D * D);
}

double quad_improper(const std::function<double(double)>& f, double lower,
                     double tail_exponent, double tol) {
  if (!(tail_exponent < -1.0))
    throw ParameterError(
        "quad_improper needs tail_exponent < -1 for convergence");
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");

  const double panel_tol = tol / 256.0;
  double total = 0.0;
  double prev_panel = 0.0;
  double prev_estimate = 0.0;
  bool have_prev_estimate = false;

  for (int m = 0; m < 48; ++m) {
    const double a = lower + (std::pow(2.0, m) - 1.0);
    const double b = lower + (std::pow(2.0, m + 1) - 1.0);
    const double panel = tanh_sinh_panel(f, a, b, panel_tol);
    total += panel;

    if (m >= 1) {
      if (std::abs(panel) < 1e-300 && std::abs(prev_panel) < 1e-300)
        return total;  // integrand already dead; the tail is zero
      if (std::abs(prev_panel) > 0.0) {
        const double rho = panel / prev_panel;
        if (std::abs(rho) < 0.95) {
          const double estimate = total + panel * rho / (1.0 - rho);
          if (have_prev_estimate &&
              std::abs(estimate - prev_estimate) <= 0.5 * tol)
            return estimate;
          prev_estimate = estimate;
          have_prev_estimate = true;
        } else {
          have_prev_estimate = false;
        }
      }
    }
    prev_panel = panel;
  }
  throw ToleranceError(
      "improper integral tail failed to stabilize within the panel budget");
}

double finite_diff(const std::function<double(double)>& f, double x, double h,
                   int order) {
  if (!(h > 0.0)) throw ParameterError("finite_diff requires h > 0");
  if (order == 1) return (f(x + h) - f(x - h)) / (2.0 * h);
  if (order == 2) return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
  throw ParameterError("finite_diff order must be 1 or 2, got " +
                       std::to_string(order));
}

} // namespace hessrad::oracles
