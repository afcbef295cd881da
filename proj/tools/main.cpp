#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hessrad/asymptotics.hpp"
#include "hessrad/detail/numeric.hpp"
#include "hessrad/errors.hpp"
#include "hessrad/g_profile.hpp"
#include "hessrad/radial_solution.hpp"
#include "hessrad/trajectory.hpp"
#include "verify_suite.hpp"

using json = nlohmann::ordered_json;
using namespace hessrad;

namespace {

struct RunConfig {
  std::string family = "sigma-k";
  int n = 0;
  int k = 0;
  int l = 0;
  double ode_tol = 1e-10;
  double quad_tol = 1e-9;
  double root_tol = 1e-10;
  int points = 512;
  double r_out = 1e3;
  std::string format = "csv";
  std::string output;
  double alpha = 0.0;
  double b = 0.0;
  double c = 0.0;
  bool parallel = false;
  std::string config_path;
};

// Flat key=value config, two-phase: find the file (--config flag or the
// HESSRAD_CONFIG variable), then splice each recognized key as a
// "--key=value" token right after the subcommand name. The spliced tokens
// run through the ordinary parse, so range checks apply to them, and the
// user's own flags come later in the stream and win under the take-last
// policy. Keys the selected subcommand does not define are ignored so one
// file can serve several subcommands.
std::vector<std::pair<std::string, std::string>> read_config_pairs(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw IoError("config line is not key=value: " + t);
    pairs.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return pairs;
}

std::vector<std::string> splice_config(const CLI::App& app, int argc,
                                       char** argv) {
  std::vector<std::string> tokens(argv + 1, argv + argc);

  std::string path;
  bool explicit_path = false;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == "--config" && i + 1 < tokens.size()) {
      path = tokens[i + 1];
      explicit_path = true;
    } else if (tokens[i].rfind("--config=", 0) == 0) {
      path = tokens[i].substr(9);
      explicit_path = true;
    }
  }
  if (!explicit_path) {
    if (const char* env = std::getenv("HESSRAD_CONFIG")) path = env;
    if (!path.empty() && !std::ifstream(path)) return tokens;  // stale env
  }
  if (path.empty() || tokens.empty()) return tokens;

  const CLI::App* sub = nullptr;
  for (const auto* s : app.get_subcommands([](const CLI::App*) {
         return true;
       }))
    if (s->get_name() == tokens.front()) sub = s;
  if (sub == nullptr) return tokens;

  std::vector<std::string> spliced;
  spliced.push_back(tokens.front());
  for (const auto& [key, value] : read_config_pairs(path)) {
    if (key == "config") continue;
    if (sub->get_option_no_throw("--" + key) != nullptr)
      spliced.push_back("--" + key + "=" + value);
  }
  spliced.insert(spliced.end(), tokens.begin() + 1, tokens.end());
  return spliced;
}

OperatorSpec to_operator(const RunConfig& cfg) {
  const Family fam = cfg.family == "sigma-k" ? Family::SigmaK
                                             : Family::HessianQuotient;
  return make_operator(fam, cfg.n, cfg.k, cfg.l);
}

OdeOptions to_ode(const RunConfig& cfg) {
  OdeOptions ode;
  ode.tol = cfg.ode_tol;
  return ode;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

void write_text(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << body;
  if (!out.good()) throw IoError("write failed: " + path);
}

// Every subcommand shares the config-file hook; most also take an operator
// and the tolerance knobs. Config keys mirror the long flag names
// (family=..., ode-tol=...); command-line flags take precedence, and
// HESSRAD_CONFIG names a default config path.
CLI::App* add_subcommand(CLI::App& app, RunConfig& cfg, const char* name,
                         const char* desc, bool with_operator = true,
                         bool operator_required = true) {
  auto* sub = app.add_subcommand(name, desc);
  sub->add_option("--config", cfg.config_path,
                  "flat key=value config file mirroring the flags "
                  "(HESSRAD_CONFIG names a default)");
  if (with_operator) {
    sub->add_option("--family", cfg.family,
                    "operator family: sigma-k or hessian-quotient")
        ->check(CLI::IsMember({"sigma-k", "hessian-quotient"}))
        ->capture_default_str();
    auto* n_opt = sub->add_option("--n", cfg.n, "ambient dimension");
    auto* k_opt = sub->add_option("--k", cfg.k, "upper Hessian index");
    sub->add_option("--l", cfg.l, "lower index (hessian-quotient only)");
    if (operator_required) {
      n_opt->required();
      k_opt->required();
    }
  }
  sub->add_option("--ode-tol", cfg.ode_tol, "ODE local error tolerance")
      ->check(CLI::Range(1e-13, 1e-6))
      ->capture_default_str();
  sub->add_option("--quad-tol", cfg.quad_tol, "quadrature tolerance")
      ->check(CLI::Range(1e-13, 1e-4))
      ->capture_default_str();
  sub->add_option("--root-tol", cfg.root_tol, "root-finding tolerance")
      ->check(CLI::Range(1e-13, 1e-4))
      ->capture_default_str();
  return sub;
}

json verdict_json(const ExistenceVerdict& v) {
  json j;
  j["c"] = v.c;
  j["c0"] = v.c0;
  j["exists"] = v.exists;
  if (v.has_alpha)
    j["alpha"] = v.alpha;
  else
    j["alpha"] = nullptr;
  j["margin"] = v.margin;
  return j;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "radially symmetric exterior-Dirichlet solutions for k-Hessian and "
      "Hessian quotient operators"};
  app.require_subcommand(1);
  RunConfig cfg;
  int rc = 0;

  auto* sc_cstar = add_subcommand(app, cfg, "cstar",
                                  "print the diagonal normalization c*");
  sc_cstar->callback([&] {
    json j;
    j["c_star"] = c_star(to_operator(cfg));
    emit(j);
  });

  auto* sc_gprof = add_subcommand(app, cfg, "gprofile",
                                  "tabulate the implicit profile g(gamma)");
  sc_gprof->add_option("--points", cfg.points, "grid size")
      ->check(CLI::Range(16, 1 << 20))
      ->capture_default_str();
  sc_gprof->add_option("--output", cfg.output, "output path (default stdout)");
  sc_gprof->callback([&] {
    const auto profile = build_g_profile(to_operator(cfg), cfg.points);
    std::ostringstream csv;
    csv << "gamma,g,gprime\n";
    for (size_t i = 0; i < profile.gamma.size(); ++i)
      csv << detail::fmt17(profile.gamma[i]) << ","
          << detail::fmt17(profile.g[i]) << ","
          << detail::fmt17(profile.gprime[i]) << "\n";
    write_text(cfg.output, csv.str());
  });

  auto* sc_trace = add_subcommand(app, cfg, "trace",
                                  "tabulate W(r) = u'(r)/r for one alpha");
  sc_trace->add_option("--alpha", cfg.alpha, "shooting parameter u'(1)")
      ->required();
  sc_trace->add_option("--points", cfg.points, "grid size")
      ->check(CLI::Range(16, 1 << 20))
      ->capture_default_str();
  sc_trace->add_option("--r-out", cfg.r_out, "outer radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sc_trace->add_option("--output", cfg.output, "output path (default stdout)");
  sc_trace->callback([&] {
    const auto tr = integrate_auto(to_operator(cfg), cfg.alpha, to_ode(cfg));
    std::ostringstream csv;
    csv << "r,W\n";
    for (double r : detail::geomspace(1.0, cfg.r_out, cfg.points))
      csv << detail::fmt17(r) << "," << detail::fmt17(W_at(tr, r)) << "\n";
    write_text(cfg.output, csv.str());
  });

  auto* sc_mu = add_subcommand(app, cfg, "mu",
                               "asymptotic constant mu(alpha)");
  sc_mu->add_option("--alpha", cfg.alpha, "shooting parameter u'(1)")
      ->required();
  sc_mu->callback([&] {
    json j;
    j["alpha"] = cfg.alpha;
    j["mu"] = mu(to_operator(cfg), cfg.alpha, cfg.quad_tol, to_ode(cfg));
    emit(j);
  });

  auto* sc_thresh = add_subcommand(app, cfg, "threshold",
                                   "existence threshold c0(b)");
  sc_thresh->add_option("--b", cfg.b, "boundary value u(1)")
      ->capture_default_str();
  sc_thresh->callback([&] {
    const auto th = c0(to_operator(cfg), cfg.b, cfg.root_tol, to_ode(cfg));
    json j;
    j["gamma0"] = th.gamma0;
    j["alpha_min"] = th.alpha_min;
    j["mu_min"] = th.mu_at_alpha_min;
    j["b"] = th.b;
    j["c0"] = th.c0;
    j["diagnostics"] = {
        {"tail_fraction_of_mu", th.diagnostics.tail_fraction_of_mu},
        {"extrapolation_spread", th.diagnostics.extrapolation_spread},
        {"alpha_min_minus_gamma0", th.diagnostics.alpha_min_minus_gamma0}};
    emit(j);
  });

  auto* sc_classify = add_subcommand(app, cfg, "classify",
                                     "existence verdict for (b, c)");
  sc_classify->add_option("--b", cfg.b, "boundary value u(1)")
      ->capture_default_str();
  sc_classify->add_option("--c", cfg.c, "asymptotic constant")->required();
  sc_classify->callback([&] {
    emit(verdict_json(classify_existence(to_operator(cfg), cfg.b, cfg.c,
                                         cfg.root_tol, to_ode(cfg))));
  });

  auto* sc_solve = add_subcommand(app, cfg, "solve",
                                  "classify, then assemble the solution");
  sc_solve->add_option("--b", cfg.b, "boundary value u(1)")
      ->capture_default_str();
  sc_solve->add_option("--c", cfg.c, "asymptotic constant")->required();
  sc_solve->add_option("--points", cfg.points, "grid size")
      ->check(CLI::Range(16, 1 << 20))
      ->capture_default_str();
  sc_solve->add_option("--r-out", cfg.r_out, "outer radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sc_solve->add_option("--format", cfg.format, "solution file format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sc_solve->add_option("--output", cfg.output,
                       "write the sampled solution to this path");
  sc_solve->callback([&] {
    const auto op = to_operator(cfg);
    const auto ode = to_ode(cfg);
    const auto v = classify_existence(op, cfg.b, cfg.c, cfg.root_tol, ode);
    if (!v.exists) {
      emit(verdict_json(v));
      std::cerr << "no admissible solution: c=" << v.c << " is below c0="
                << v.c0 << "\n";
      rc = 2;
      return;
    }
    const auto sol = assemble_solution(op, v.alpha, cfg.b, cfg.r_out,
                                       cfg.points, ode, cfg.quad_tol);
    const auto rep = residual_report(op, sol);
    if (!cfg.output.empty()) export_solution(sol, cfg.output, cfg.format);
    json j;
    j["alpha"] = sol.alpha;
    j["b"] = sol.b;
    j["c"] = sol.c;
    j["c0"] = v.c0;
    j["mu"] = sol.mu_value;
    j["max_residual"] = rep.max_residual;
    j["cone_violations"] = rep.cone_violations;
    j["decay_slope"] = rep.decay_slope;
    j["decay_expected"] = rep.decay_expected;
    j["c_estimate"] = rep.c_estimate;
    j["c_error"] = rep.c_error;
    if (cfg.output.empty())
      j["output"] = nullptr;
    else
      j["output"] = cfg.output;
    emit(j);
  });

  auto* sc_verify = add_subcommand(
      app, cfg, "verify", "cross-check operators against closed forms", true,
      /*operator_required=*/false);
  sc_verify->add_flag("--parallel", cfg.parallel,
                      "run per-operator checks concurrently");
  sc_verify->callback([&] {
    std::vector<OperatorSpec> ops;
    if (cfg.n != 0 || cfg.k != 0) {
      ops.push_back(to_operator(cfg));
    } else {
      ops = verify::default_operator_set();
    }
    verify::SuiteOptions so;
    so.ode_tol = cfg.ode_tol;
    so.quad_tol = cfg.quad_tol;
    so.root_tol = cfg.root_tol;
    so.parallel = cfg.parallel;
    const auto rep = verify::run_suite(ops, so);
    std::cout << verify::format_report(rep);
    if (rep.any_failed) rc = 4;
  });

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    for (auto* opt : sub->get_options())
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  try {
    std::vector<std::string> args = splice_config(app, argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 3;
  } catch (const OutsideDomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << "\n";
    return 4;
  }
  return rc;
}
