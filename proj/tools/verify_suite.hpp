#pragma once

#include <string>
#include <vector>

#include "hessrad/operator_spec.hpp"

namespace hessrad::verify {

struct CheckRow {
  std::string op;      // operator label
  std::string check;   // short check name
  bool pass = false;
  std::string detail;  // measured quantity, fixed formatting
};

struct SuiteOptions {
  double ode_tol = 1e-10;
  double quad_tol = 1e-9;
  double root_tol = 1e-10;
  bool parallel = false;  // one task per operator; row order stays fixed
};

// Cross-checks a single operator against closed forms and independent
// quadrature. Rows come back in a fixed order so reports are reproducible.
std::vector<CheckRow> check_operator(const OperatorSpec& op,
                                     const SuiteOptions& opts);

// All sigma_k operators with 3 <= n <= 5 used by the regression set, plus
// two Hessian quotients.
std::vector<OperatorSpec> default_operator_set();

struct SuiteReport {
  std::vector<CheckRow> rows;
  bool any_failed = false;
};

SuiteReport run_suite(const std::vector<OperatorSpec>& ops,
                      const SuiteOptions& opts);

// Fixed-width pass/fail table plus a one-line summary.
std::string format_report(const SuiteReport& report);

} // namespace hessrad::verify
