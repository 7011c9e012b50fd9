// Command-line driver: runs the iterative solvers or the exact oracles on a
// bundled or file-based scenario and writes trace/solution artifacts.
//
// Exit status: 0 converged/solved, 2 non-convergence or infeasible, 1 input error.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nsdp/nsdp.hpp"

namespace {

void print_summary(const nsdp::Solution& sol, const std::string& algo) {
  std::printf("algorithm:      %s\n", algo.c_str());
  std::printf("iterations:     %ld\n", sol.iterations_used);
  std::printf("converged:      %s\n", sol.converged ? "yes" : "no");
  if (sol.has_integer) {
    std::printf("integer cost:   %.9g\n", sol.integer_cost);
    std::printf("feasible:       %s\n", sol.integer_feasible ? "yes" : "no");
    std::printf("avg cost:       %.9g\n", sol.cost);
  } else {
    std::printf("cost:           %.9g\n", sol.cost);
  }
  std::printf("max violation:  %.9g\n", sol.max_violation);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NSDP solver toolkit: queue-driven service distribution over cloud networks"};

  std::string scenario_arg, algo = "qnsd";
  std::string trace_path, solution_path, emit_path;
  double V = 0, theta = 0, tol = 0;
  long max_iters = 0, trace_every = 0;
  int cap_limit = 0;
  bool no_truncate = false;

  app.add_option("--scenario", scenario_arg, "Bundled scenario name or path to a scenario file")
      ->required();
  app.add_option("--algo", algo, "Algorithm: qnsd, cqnsd, lp, ilp")
      ->check(CLI::IsMember({"qnsd", "cqnsd", "lp", "ilp"}));
  auto* opt_v = app.add_option("--V", V, "Control parameter (optimality vs running time)");
  auto* opt_theta = app.add_option("--theta", theta, "Momentum parameter in [0,1)");
  auto* opt_iters = app.add_option("--max-iters", max_iters, "Iteration budget");
  auto* opt_tol = app.add_option("--tol", tol, "Convergence tolerance on conservation surplus");
  auto* opt_stride = app.add_option("--trace-every", trace_every, "Trace sampling stride");
  app.add_option("--trace", trace_path, "Write the iteration trace (CSV) here");
  app.add_option("--solution", solution_path, "Write the solution artifact (JSON) here");
  app.add_flag("--no-truncate", no_truncate,
               "Disable frame-doubled averaging (plain running average)");
  app.add_option("--cap-limit", cap_limit, "Clamp per-edge range for the ilp enumeration");
  app.add_option("--emit-scenario", emit_path, "Write the resolved scenario as JSON and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    nsdp::Scenario sc = nsdp::resolve_scenario(scenario_arg);
    nsdp::QnsdParams params = sc.defaults;
    if (opt_v->count()) params.V = V;
    if (opt_theta->count()) params.theta = theta;
    if (opt_iters->count()) params.max_iters = max_iters;
    if (opt_tol->count()) params.tol = tol;
    if (opt_stride->count()) params.trace_every = trace_every;
    if (no_truncate) params.truncate_frames = false;
    params.validate();

    if (!emit_path.empty()) {
      nsdp::save_scenario(sc, emit_path);
      std::printf("scenario '%s' written to %s\n", sc.name.c_str(), emit_path.c_str());
      return 0;
    }

    nsdp::AugmentedGraph g = sc.build();

    if (algo == "lp") {
      nsdp::LpSolution lp = nsdp::solve_fractional_lp(g);
      switch (lp.status) {
        case nsdp::LpStatus::Optimal:
          std::printf("lp optimum:     %.9g\n", lp.cost);
          return 0;
        case nsdp::LpStatus::Infeasible:
          std::printf("lp status:      infeasible\n");
          return 2;
        case nsdp::LpStatus::Unbounded:
          std::printf("lp status:      unbounded\n");
          return 2;
        default:
          std::printf("lp status:      iteration limit\n");
          return 2;
      }
    }
    if (algo == "ilp") {
      nsdp::IlpSolution ilp = nsdp::solve_integer_bruteforce(g, cap_limit);
      if (ilp.status == nsdp::IlpSolution::Status::TooLarge) {
        std::fprintf(stderr, "error: instance too large for exhaustive search "
                             "(restrict with --cap-limit)\n");
        return 1;
      }
      if (ilp.status == nsdp::IlpSolution::Status::Infeasible) {
        std::printf("ilp status:     infeasible\n");
        return 2;
      }
      std::printf("ilp optimum:    %.9g\n", ilp.cost);
      return 0;
    }

    auto [sol, trace] = algo == "cqnsd" ? nsdp::run_cqnsd(g, params) : nsdp::run_qnsd(g, params);
    if (!trace_path.empty()) nsdp::emit_trace(trace, trace_path);
    if (!solution_path.empty()) nsdp::emit_solution(sol, g, algo, solution_path);
    print_summary(sol, algo);
    return sol.converged ? 0 : 2;
  } catch (const nsdp::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
