#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "hessrad/errors.hpp"
#include "hessrad/g_profile.hpp"
#include "hessrad/radial_solution.hpp"
#include "json.hpp"

using namespace hessrad;

namespace {

OdeOptions tight() {
  OdeOptions o;
  o.tol = 1e-12;
  return o;
}

} // namespace

TEST_CASE("boundary data is reproduced on the first grid point") {
  const auto op = make_operator(Family::SigmaK, 3, 2);
  const auto sol = assemble_solution(op, 0.4, -3.0, 100.0, 64, tight());
  CHECK(sol.r.front() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sol.u.front() == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(sol.uprime.front() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(sol.usecond.front() ==
        doctest::Approx(g_eval(op, 0.4)).epsilon(1e-10));
  CHECK(sol.c == doctest::Approx(sol.mu_value + sol.b - 0.5 * sol.cstar)
                     .epsilon(1e-14));
}

TEST_CASE("the diagonal shooting value gives the exact quadratic solution") {
  const auto op = make_operator(Family::SigmaK, 4, 4);
  const double cs = c_star(op);
  const auto sol = assemble_solution(op, cs, 1.0, 1e3, 128, tight(), 1e-12);
  for (size_t i = 0; i < sol.r.size(); i += 16) {
    const double want = 1.0 + 0.5 * cs * (sol.r[i] * sol.r[i] - 1.0);
    CHECK(sol.u[i] == doctest::Approx(want).epsilon(1e-12));
  }
  const auto rep = residual_report(op, sol);
  CHECK(rep.max_residual < 1e-12);
  CHECK(rep.cone_violations == 0);
}

TEST_CASE("generic solutions satisfy the equation to quadrature accuracy") {
  for (auto family_case : {0, 1}) {
    const auto op = family_case == 0
                        ? make_operator(Family::SigmaK, 3, 2)
                        : make_operator(Family::HessianQuotient, 4, 3, 1);
    const double alpha = 2.0 * c_star(op);
    const auto sol = assemble_solution(op, alpha, 0.0, 1e3, 256, tight(),
                                       1e-11);
    const auto rep = residual_report(op, sol);
    CHECK(rep.max_residual < 1e-8);
    CHECK(rep.cone_violations == 0);
    CHECK(rep.decay_expected == doctest::Approx(2.0 - op.n));
    CHECK(std::abs(rep.decay_slope - rep.decay_expected) < 0.1);
    CHECK(rep.c_error < 1e-7);
    CHECK(rep.c_estimate == doctest::Approx(sol.c).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("the profile gradient is positive and increasing in radius") {
  const auto op = make_operator(Family::SigmaK, 3, 3);
  const auto sol = assemble_solution(op, 0.5, 0.0, 100.0, 64, tight());
  for (size_t i = 1; i < sol.r.size(); ++i) {
    CHECK(sol.uprime[i] > 0.0);
    CHECK(sol.uprime[i] > sol.uprime[i - 1]); // r W(r) grows with r
  }
}

TEST_CASE("csv export round-trips samples at full precision") {
  const auto op = make_operator(Family::SigmaK, 3, 2);
  const auto sol = assemble_solution(op, 0.125, 0.25, 50.0, 32, tight());
  const std::string path = "/tmp/hessrad_test_sol.csv";
  export_solution(sol, path, "csv");

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "r,u,uprime,usecond,residual");
  size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    const double r = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    const double u = std::strtod(field.c_str(), nullptr);
    // %.17g output parses back to the identical double
    CHECK(r == sol.r[rows]);
    CHECK(u == sol.u[rows]);
    ++rows;
  }
  CHECK(rows == sol.r.size());
  std::remove(path.c_str());
}

TEST_CASE("json export carries the documented schema") {
  const auto op = make_operator(Family::HessianQuotient, 5, 4, 2);
  const double alpha = 1.5 * c_star(op);
  const auto sol = assemble_solution(op, alpha, -1.0, 100.0, 48, tight());
  const std::string path = "/tmp/hessrad_test_sol.json";
  export_solution(sol, path, "json");

  std::ifstream in(path);
  REQUIRE(in.good());
  const auto j = nlohmann::json::parse(in);
  CHECK(j["operator"]["family"] == "hessian_quotient");
  CHECK(j["operator"]["n"] == 5);
  CHECK(j["operator"]["k"] == 4);
  CHECK(j["operator"]["l"] == 2);
  CHECK(j["operator"]["label"] == "quot42_n5");
  CHECK(j["alpha"].get<double>() == doctest::Approx(alpha));
  CHECK(j["b"].get<double>() == doctest::Approx(-1.0));
  CHECK(j["c_star"].get<double>() == doctest::Approx(c_star(op)));
  CHECK(j["c"].get<double>() ==
        doctest::Approx(sol.mu_value - 1.0 - 0.5 * sol.cstar));
  for (const char* key : {"r", "u", "uprime", "usecond", "residual"}) {
    REQUIRE(j["samples"][key].is_array());
    CHECK(j["samples"][key].size() == sol.r.size());
  }
  for (const auto& v : j["samples"]["residual"])
    CHECK(v.get<double>() < 1e-8);
  std::remove(path.c_str());
}

TEST_CASE("export failures surface as io or parameter errors") {
  const auto op = make_operator(Family::SigmaK, 3, 2);
  const auto sol = assemble_solution(op, 0.3, 0.0, 50.0, 32, tight());
  CHECK_THROWS_AS(export_solution(sol, "/nonexistent_dir_zz/ou t.csv", "csv"),
                  IoError);
  CHECK_THROWS_AS(export_solution(sol, "/tmp/x.bin", "xml"), ParameterError);
}

TEST_CASE("assembly validates its grid parameters") {
  const auto op = make_operator(Family::SigmaK, 3, 2);
  CHECK_THROWS_AS(assemble_solution(op, 0.3, 0.0, 5.0, 64), ParameterError);
  CHECK_THROWS_AS(assemble_solution(op, 0.3, 0.0, 100.0, 8), ParameterError);
  CHECK_THROWS_AS(assemble_solution(op, 0.3, 0.0, 100.0, 64, {}, -1.0),
                  ParameterError);
  // Below the admissible floor the trajectory itself refuses.
  const auto op55 = make_operator(Family::SigmaK, 5, 5);
  CHECK_THROWS_AS(assemble_solution(op55, 1e-4, 0.0, 100.0, 64),
                  AdmissibilityError);
}
