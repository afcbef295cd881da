#pragma once

#include <string>
#include <vector>

#include "hessrad/asymptotics.hpp"
#include "hessrad/trajectory.hpp"

namespace hessrad {

struct RadialSolution {
  OperatorSpec op;
  double alpha = 0.0;   // u'(1)
  double b = 0.0;       // u(1)
  double c = 0.0;       // asymptotic constant mu(alpha) + b - c*/2
  double cstar = 0.0;
  double mu_value = 0.0;
  double gamma0 = 0.0;
  double gamma0_enclosure = 0.0;
  Trajectory traj;
  std::vector<double> r;        // log-spaced grid on [1, R_out]
  std::vector<double> u;
  std::vector<double> uprime;   // r W(r)
  std::vector<double> usecond;  // g(W(r))
};

// Builds the radial profile: u by cumulative adaptive quadrature of e^{2t} W
// over the trajectory dense output, u'' from the calibration identity
// u'' = g(u'/r). Grid: `points` log-spaced radii on [1, R_out], R_out >= 10,
// points >= 16. Throws AdmissibilityError (via the trajectory) when alpha is
// below the admissible floor, ParameterError on bad grid parameters.
RadialSolution assemble_solution(const OperatorSpec& op, double alpha,
                                 double b, double r_out = 1e3,
                                 int points = 512,
                                 const OdeOptions& opts = {},
                                 double quad_tol = 1e-9);

struct ResidualReport {
  double max_residual = 0.0;   // max_i |f(lambda(D^2 u))(r_i) - 1|
  int cone_violations = 0;     // grid points outside the cone (0 expected)
  double decay_slope = 0.0;    // fitted exponent of |u - (c*/2 r^2 + c)|
  double c_estimate = 0.0;     // tail-corrected u(R) - c* R^2/2 at R = r_out
  // extra diagnostics (not part of the serialized report)
  double c_error = 0.0;            // |c_estimate - stored c|
  double decay_expected = 0.0;     // 2 - n
  bool decay_noise_floored = false;
};

// Pointwise PDE residual, cone check, asymptotic-constant cross-check, and
// the decay exponent of the expansion remainder over the outer half-grid.
ResidualReport residual_report(const OperatorSpec& op,
                               const RadialSolution& sol);

// Writes the sampled profile; format "csv" (columns r,u,uprime,usecond,
// residual) or "json" (documented schema). Throws IoError on filesystem
// failure, ParameterError on unknown format.
void export_solution(const RadialSolution& sol, const std::string& path,
                     const std::string& format);

} // namespace hessrad
