#pragma once

#include <functional>

#include "hessrad/operator_spec.hpp"

// Independent ground-truth generators: closed-form sigma_k trajectories, the
// explicit threshold constant, brute-force improper quadrature, and finite
// differences. None of these touch the profile/ODE pipeline, so the two
// sides can catch each other's bugs.
namespace hessrad::oracles {

struct SigmaKOracle {
  int n = 0;
  int k = 0;
  double a = 0.0;  // (C(n,k))^{-1/k}
};

// Throws ParameterError unless 2 <= k <= n, n >= 3.
SigmaKOracle make_sigma_oracle(int n, int k);

// Exact first integral of the radial sigma_k equation:
//   W(r) = (a^k + (alpha^k - a^k) r^{-n})^{1/k}.
// Throws DomainError on a negative radicand with even k.
double oracle_W(const SigmaKOracle& o, double alpha, double r);

// mu(alpha) = integral_1^inf s (W(s) - a) ds via improper quadrature of the
// closed form above.
double oracle_mu(const SigmaKOracle& o, double alpha, double tol = 1e-12);

// Threshold constant C* = a_hat - a/2 + a * I with
//   I = integral_1^inf s ((1 - s^{-n})^{1/k} - 1) ds.
double oracle_threshold_constant(const SigmaKOracle& o, double a_hat,
                                 double tol = 1e-13);

// Closed-form profile g(gamma) for both families (algebraic, no root
// finder). Throws OutsideDomainError at or past the blowup endpoint.
double oracle_g(const OperatorSpec& op, double gamma);

// Analytic derivative of the closed forms above.
double oracle_g_prime(const OperatorSpec& op, double gamma);

// integral_lower^inf of f, assuming |f(s)| <= C s^{tail_exponent} with
// tail_exponent < -1: double-exponential panels to a cut radius, then a
// Richardson-accelerated tail from panel doubling. Throws ToleranceError
// when the tail estimate fails to stabilize, ParameterError for
// tail_exponent >= -1.
double quad_improper(const std::function<double(double)>& f, double lower,
                     double tail_exponent, double tol);

// Central differences; order 1: (f(x+h)-f(x-h))/2h,
// order 2: (f(x+h)-2f(x)+f(x-h))/h^2.
double finite_diff(const std::function<double(double)>& f, double x, double h,
                   int order = 1);

} // namespace hessrad::oracles
