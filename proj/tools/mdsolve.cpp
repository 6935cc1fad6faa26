// mdsolve: generate instances, run the mirror descent solvers, verify the
// theorem-level guarantees, and sweep epsilon for rate tables.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "md/errors.hpp"
#include "md/reference.hpp"
#include "md/solvers.hpp"

namespace {

using namespace md;

enum LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("MD_LOG");
  if (!env) return kQuiet;
  const std::string v = env;
  if (v == "debug") return kDebug;
  if (v == "info") return kInfo;
  return kQuiet;
}

void log_info(const std::string& msg) {
  if (log_level() >= kInfo) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= kDebug) std::cerr << "[debug] " << msg << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_trace_csv(const std::string& path, const SolveTrace& trace,
                     const ProblemInstance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file '" + path + "'");
  out << "k,kind,h,f,g,grad_dual_norm,vf_if_known\n";
  for (const auto& s : trace.steps) {
    out << s.k << ','
        << (s.kind == StepKind::Productive ? "productive" : "nonproductive") << ','
        << format_real(s.h) << ',' << format_real(s.f_value) << ','
        << format_real(s.g_value) << ',' << format_real(s.grad_dual_norm) << ',';
    if (inst.known_solution)
      out << format_real(v_f(*inst.objective, inst.setup,
                             trace.points[static_cast<std::size_t>(s.k)],
                             *inst.known_solution));
    out << '\n';
  }
  if (!out) throw std::runtime_error("trace write failed for '" + path + "'");
}

void write_restart_csv(const std::string& path, const RestartReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file '" + path + "'");
  out << "p,R_p_sq,eps_p,inner_accuracy,inner_iterations\n";
  for (const auto& r : report.restarts)
    out << r.p << ',' << format_real(r.R_p_sq) << ',' << format_real(r.eps_p) << ','
        << format_real(r.inner_accuracy) << ',' << r.inner_iterations << '\n';
  if (!out) throw std::runtime_error("trace write failed for '" + path + "'");
}

double min_productive_vf(const SolveTrace& trace, const ProblemInstance& inst) {
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& s : trace.steps)
    if (s.kind == StepKind::Productive)
      mn = std::min(mn, v_f(*inst.objective, inst.setup,
                            trace.points[static_cast<std::size_t>(s.k)],
                            *inst.known_solution));
  return mn;
}

int cmd_solve(const std::string& instance_path, const std::string& algorithm, double eps,
              const std::string& trace_path, double cap_multiplier,
              std::optional<double> r0_sq) {
  if (!(eps > 0.0)) {
    std::cerr << "error: --epsilon must be positive\n";
    return 2;
  }
  auto inst = load_instance(instance_path);
  log_info("loaded instance: dim=" + std::to_string(inst.dim()));
  const auto t0 = std::chrono::steady_clock::now();

  if (algorithm == "restart") {
    if (!r0_sq) {
      std::cerr << "error: --r0-sq is required for the restart algorithm\n";
      return 2;
    }
    auto report = run_restarted(inst, eps, inst.setup.center(), *r0_sq);
    const double secs = seconds_since(t0);
    if (!trace_path.empty()) write_restart_csv(trace_path, report);
    std::cout << "restarts=" << report.p_hat
              << " inner_iterations=" << report.total_inner_iterations()
              << " f(x)=" << format_real(inst.objective->value(report.final_point))
              << " g(x)=" << format_real(inst.constraint->value(report.final_point))
              << " time=" << secs << "s\n";
    return 0;
  }

  SolveTrace trace;
  if (algorithm == "adaptive") {
    const int bound = iteration_bound_adaptive(inst.Mg, inst.theta0_sq, eps);
    const int cap = static_cast<int>(std::min<double>(2.0e9, cap_multiplier * bound));
    trace = run_adaptive(inst, eps, cap);
  } else {
    trace = run_partial_adaptive(inst, eps);
  }
  const double secs = seconds_since(t0);
  if (!trace_path.empty()) write_trace_csv(trace_path, trace, inst);
  std::cout << "N=" << trace.total_steps() << " |I|=" << trace.productive_count
            << " |J|=" << trace.nonproductive_count
            << " f(xbar)=" << format_real(trace.output_value)
            << " g(xbar)=" << format_real(inst.constraint->value(trace.output_point))
            << " time=" << secs << "s\n";
  return 0;
}

int cmd_verify(const std::string& instance_path, double eps, std::optional<double> r0_sq) {
  if (!(eps > 0.0)) {
    std::cerr << "error: --epsilon must be positive\n";
    return 2;
  }
  auto inst = load_instance(instance_path);
  std::vector<CheckReport> reports;
  bool missing_solution_checks = false;

  auto add = [&](CheckReport r) { reports.push_back(std::move(r)); };
  auto simple = [&](const std::string& name, bool ok, double lhs, double rhs,
                    const std::string& details) {
    CheckReport r;
    r.name = name;
    r.passed = ok;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.details = details;
    reports.push_back(std::move(r));
  };

  // runs that do not need x*
  const int adaptive_bound = iteration_bound_adaptive(inst.Mg, inst.theta0_sq, eps);
  auto adaptive = run_adaptive(inst, eps, 10 * adaptive_bound);
  auto partial = run_partial_adaptive(inst, eps);

  simple("theorem1_stop_within_bound",
         adaptive.stop_reason == StopReason::CriterionMet &&
             adaptive.total_steps() <= adaptive_bound,
         adaptive.total_steps(), adaptive_bound, "adaptive stopping criterion");
  simple("trace_step_accounting",
         adaptive.productive_count + adaptive.nonproductive_count ==
                 adaptive.total_steps() &&
             partial.productive_count + partial.nonproductive_count ==
                 partial.total_steps(),
         0, 0, "|I| + |J| = N");
  simple("theorem2_productive_exists", partial.productive_count >= 1, 1,
         partial.productive_count, "|I| >= 1 after the fixed budget");
  simple("theorem2_output_feasible",
         inst.constraint->value(partial.output_point) <= eps,
         inst.constraint->value(partial.output_point), eps, "g(xbar) <= eps");
  {
    bool constant = true;
    for (const auto& s : partial.steps)
      if (s.kind == StepKind::NonProductive && s.h != eps / (inst.Mg * inst.Mg))
        constant = false;
    simple("nonproductive_step_size_constant", constant, 0, 0, "h = eps / Mg^2");
  }

  if (inst.known_solution) {
    add(check_md_step_inequality(adaptive, inst));
    {
      auto r = check_md_step_inequality(partial, inst);
      r.name = "md_step_inequality_partial";
      add(r);
    }
    simple("theorem1_min_vf", min_productive_vf(adaptive, inst) < eps,
           min_productive_vf(adaptive, inst), eps, "min v_f < eps");
    simple("theorem2_min_vf", min_productive_vf(partial, inst) < eps / inst.Mg,
           min_productive_vf(partial, inst), eps / inst.Mg, "min v_f < eps / Mg");
    if (inst.known_value && inst.grad_at_solution_norm && inst.L >= 0.0)
      add(check_gap_bound(partial, inst, eps));
    if (inst.dim() <= 3) {
      // Lemma 2 spot check on the best productive iterate
      const double merit =
          v_f(*inst.objective, inst.setup, partial.output_point, *inst.known_solution);
      if (merit > 0.0) {
        const double om = estimate_omega(inst, merit, 201);
        simple("lemma2_omega_bound",
               partial.output_value - *inst.known_value <= om + 0.05 * (merit + 0.01),
               partial.output_value - *inst.known_value, om, "f gap <= omega(v_f)");
      }
    }
  } else {
    missing_solution_checks = true;
  }

  if (inst.mu > 0.0 && r0_sq) {
    auto report = run_restarted(inst, eps, inst.setup.center(), *r0_sq);
    bool radii_ok = true;
    for (const auto& r : report.restarts)
      if (r.R_p_sq != *r0_sq * std::pow(2.0, -r.p)) radii_ok = false;
    simple("theorem3_radii_halving", radii_ok, 0, 0, "R_p^2 = R_0^2 2^-p exactly");
    if (inst.known_solution) {
      bool contained = true;
      double worst = 0.0;
      for (const auto& r : report.restarts) {
        const Vec d = sub(r.x_p, *inst.known_solution);
        worst = std::max(worst, dot(d, d) - r.R_p_sq);
        if (dot(d, d) > r.R_p_sq + 1e-9) contained = false;
      }
      simple("theorem3_radius_containment", contained, worst, 1e-9,
             "||x_p - x*||^2 <= R_p^2");
      const Vec d = sub(report.final_point, *inst.known_solution);
      simple("theorem3_final_accuracy", dot(d, d) <= 2.0 * eps / inst.mu, dot(d, d),
             2.0 * eps / inst.mu, "final squared distance");
      for (const auto& r : report.restarts) {
        auto loc = check_strong_convexity_localization(r.x_p, inst, r.eps_p, r.eps_p);
        loc.name += "_p" + std::to_string(r.p);
        add(loc);
      }
    }
  }

  bool all_ok = true;
  std::printf("%-36s %-6s %14s %14s  %s\n", "check", "status", "lhs", "rhs", "details");
  for (const auto& r : reports) {
    const char* status = !r.applicable ? "n/a" : (r.passed ? "pass" : "FAIL");
    if (r.applicable && !r.passed) all_ok = false;
    std::printf("%-36s %-6s %14.6e %14.6e  %s\n", r.name.c_str(), status, r.lhs, r.rhs,
                r.details.c_str());
  }
  if (missing_solution_checks) {
    std::printf("%-36s %-6s %14s %14s  %s\n", "solution_dependent_checks", "FAIL", "-",
                "-", "known solution required");
    all_ok = false;
  }
  return all_ok ? 0 : 1;
}

int cmd_bench(const std::string& instance_path, const std::string& algorithm,
              std::vector<double> eps_list, const std::string& out_path,
              double cap_multiplier) {
  if (eps_list.empty()) {
    std::cerr << "error: --epsilon-list must be non-empty\n";
    return 2;
  }
  for (double e : eps_list)
    if (!(e > 0.0)) {
      std::cerr << "error: epsilon values must be positive\n";
      return 2;
    }
  auto inst = load_instance(instance_path);
  std::sort(eps_list.begin(), eps_list.end(), std::greater<double>());

  double f_star = std::numeric_limits<double>::quiet_NaN();
  if (inst.known_value) {
    f_star = *inst.known_value;
  } else if (inst.dim() <= 10) {
    log_info("no stored optimum; running the reference solver");
    f_star = reference_solve(inst).f;
  }

  std::ostringstream data;
  data << "# eps N_theory N_actual f_gap g_violation time_s\n";
  std::printf("%12s %10s %10s %14s %14s %10s\n", "eps", "N_theory", "N_actual", "f_gap",
              "g_violation", "time_s");
  for (double eps : eps_list) {
    const int n_theory = algorithm == "adaptive"
                             ? iteration_bound_adaptive(inst.Mg, inst.theta0_sq, eps)
                             : iteration_bound_partial(inst.Mg, inst.theta0_sq, eps);
    const auto t0 = std::chrono::steady_clock::now();
    SolveTrace trace;
    if (algorithm == "adaptive") {
      const int cap = static_cast<int>(std::min<double>(2.0e9, cap_multiplier * n_theory));
      trace = run_adaptive(inst, eps, cap);
    } else {
      trace = run_partial_adaptive(inst, eps);
    }
    const double secs = seconds_since(t0);
    const double gap = trace.output_value - f_star;
    const double gviol = std::max(0.0, inst.constraint->value(trace.output_point));
    std::printf("%12g %10d %10d %14.6e %14.6e %10.4f\n", eps, n_theory,
                trace.total_steps(), gap, gviol, secs);
    data << format_real(eps) << ' ' << n_theory << ' ' << trace.total_steps() << ' '
         << format_real(gap) << ' ' << format_real(gviol) << ' ' << secs << '\n';
    log_debug("eps=" + format_real(eps) + " done");
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open data file '" + out_path + "'");
    out << data.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mirror descent with functional constraints: solvers and checkers"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for all randomized components");

  // generate
  auto* gen = app.add_subcommand("generate", "generate a random max-of-quadratics instance");
  int dim = 2, pieces = 2;
  std::string gen_out, fixture;
  gen->add_option("--dim", dim, "dimension")->check(CLI::PositiveNumber);
  gen->add_option("--pieces", pieces, "number of quadratic pieces")->check(CLI::PositiveNumber);
  gen->add_option("--fixture", fixture, "write an analytic fixture instead")
      ->check(CLI::IsMember({"active-linear", "strongly-convex-ball"}));
  gen->add_option("--out", gen_out, "output instance path")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "run a solver on an instance");
  std::string instance_path, algorithm = "partial", trace_path;
  double epsilon = 0.0, cap_multiplier = 10.0;
  std::optional<double> r0_sq;
  solve->add_option("--instance", instance_path, "instance file")->required();
  solve->add_option("--algorithm", algorithm, "adaptive|partial|restart")
      ->check(CLI::IsMember({"adaptive", "partial", "restart"}));
  solve->add_option("--epsilon", epsilon, "target accuracy")->required();
  solve->add_option("--trace", trace_path, "trace CSV output path");
  solve->add_option("--cap-multiplier", cap_multiplier, "adaptive cap over the bound");
  solve->add_option("--r0-sq", r0_sq, "squared initial radius for restarts");

  // verify
  auto* verify = app.add_subcommand("verify", "run the theorem checker suite");
  std::string verify_instance;
  double verify_eps = 0.0;
  std::optional<double> verify_r0;
  verify->add_option("--instance", verify_instance, "instance file")->required();
  verify->add_option("--epsilon", verify_eps, "target accuracy")->required();
  verify->add_option("--r0-sq", verify_r0, "squared initial radius for restart checks");

  // bench
  auto* bench = app.add_subcommand("bench", "epsilon sweep with rate table output");
  std::string bench_instance, bench_alg = "partial", bench_out;
  std::vector<double> eps_list;
  double bench_cap = 10.0;
  bench->add_option("--instance", bench_instance, "instance file")->required();
  bench->add_option("--algorithm", bench_alg, "adaptive|partial")
      ->check(CLI::IsMember({"adaptive", "partial"}));
  bench->add_option("--epsilon-list", eps_list, "comma-separated accuracies")
      ->delimiter(',');
  bench->add_option("--out", bench_out, "gnuplot-compatible data file");
  bench->add_option("--cap-multiplier", bench_cap, "adaptive cap over the bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage errors are exit code 2
  }

  try {
    if (gen->parsed()) {
      md::ProblemInstance inst =
          fixture.empty()
              ? md::generate_max_quadratic(dim, pieces, seed)
              : md::make_known_solution_instance(fixture == "active-linear"
                                                     ? md::FixtureKind::ActiveLinear
                                                     : md::FixtureKind::StronglyConvexBall);
      md::save_instance(inst, gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }
    if (solve->parsed())
      return cmd_solve(instance_path, algorithm, epsilon, trace_path, cap_multiplier, r0_sq);
    if (verify->parsed()) return cmd_verify(verify_instance, verify_eps, verify_r0);
    if (bench->parsed())
      return cmd_bench(bench_instance, bench_alg, eps_list, bench_out, bench_cap);
  } catch (const md::InvariantViolation& ex) {
    std::cerr << "invariant violation: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}
