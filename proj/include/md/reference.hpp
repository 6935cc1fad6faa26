#pragma once

#include <string>

#include "md/solvers.hpp"

namespace md {

struct CheckReport {
  std::string name;
  bool passed = false;
  bool applicable = true;  // false when the check's premises do not hold
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  std::string details;
};

struct ReferenceSolution {
  Vec x;
  double f = 0.0;
  double achieved_tol = 0.0;  // f-change over the last refinement stage
};

// Independent brute-force solver: projected subgradient on the level form
// max{ f(x) - f_best, g(x) } with diminishing steps, polished by shrinking
// pattern search. Desk scale only (dim <= 10).
ReferenceSolution reference_solve(const ProblemInstance& inst, long long budget = 200000);

// Grid estimate of omega(tau) = max{ f(x) - f(x*) : x in X, ||x - x*|| <= tau }.
double estimate_omega(const ProblemInstance& inst, double tau, int grid = 401);

// Replays every retained step of a trace against the step inequality
// h <grad, x^k - x*> <= h^2/2 ||grad||*^2 + V(x^k, x*) - V(x^{k+1}, x*).
CheckReport check_md_step_inequality(const SolveTrace& trace, const ProblemInstance& inst);

// f(xbar) - f* <= ||grad f(x*)||* eps/Mg + L eps^2 / (2 Mg^2)
CheckReport check_gap_bound(const SolveTrace& trace, const ProblemInstance& inst, double eps);

// (mu/2) ||x - x*||^2 <= max{eps_f, eps_g}; marked not-applicable when x does
// not satisfy the f/g accuracy premises.
CheckReport check_strong_convexity_localization(const Vec& x, const ProblemInstance& inst,
                                                double eps_f, double eps_g);

}  // namespace md
