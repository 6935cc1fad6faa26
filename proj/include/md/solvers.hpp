#pragma once

#include <optional>
#include <vector>

#include "md/instances.hpp"

namespace md {

enum class StepKind { Productive, NonProductive };
enum class StopReason { CriterionMet, CapReached, FixedBudget };

struct StepRecord {
  int k = 0;
  StepKind kind = StepKind::Productive;
  double h = 0.0;
  double f_value = 0.0;
  double g_value = 0.0;
  double grad_dual_norm = 0.0;
  // Slack of the mirror-descent step inequality against the known solution;
  // NaN when the instance has none.
  double lemma1_residual = 0.0;
};

struct SolveTrace {
  std::vector<StepRecord> steps;
  std::vector<Vec> points;  // x^0 ... x^N
  std::vector<Vec> grads;   // subgradient driving each step
  Vec output_point;         // productive iterate with minimal f
  double output_value = 0.0;
  std::optional<int> best_productive_index;
  int productive_count = 0;
  int nonproductive_count = 0;
  StopReason stop_reason = StopReason::FixedBudget;

  int total_steps() const { return static_cast<int>(steps.size()); }
};

struct RestartRecord {
  int p = 0;
  double R_p_sq = 0.0;
  double eps_p = 0.0;
  double inner_accuracy = 0.0;  // phi(eps_p)
  int inner_iterations = 0;
  Vec x_p;
};

struct RestartReport {
  std::vector<RestartRecord> restarts;
  Vec final_point;
  int p_hat = 0;

  long long total_inner_iterations() const {
    long long t = 0;
    for (const auto& r : restarts) t += r.inner_iterations;
    return t;
  }
};

// ceil(2 max{1, Mg^2} Theta0^2 / eps^2)
int iteration_bound_adaptive(double Mg, double theta0_sq, double eps);

// ceil(2 Mg^2 Theta0^2 / eps^2)
int iteration_bound_partial(double Mg, double theta0_sq, double eps);

// Fully adaptive switching subgradient scheme with the summed stopping
// criterion; stops early once Theta0^2 is covered, or at `cap` steps.
SolveTrace run_adaptive(const ProblemInstance& inst, double eps, int cap);

// Partially adaptive variant: fixed step count, constant non-productive step
// size eps/Mg^2, productive step size eps/(Mg ||grad f||*).
SolveTrace run_partial_adaptive(const ProblemInstance& inst, double eps);

// tau(delta) = max{ delta g* + delta^2 L / 2, delta Mg }
double tau_of_delta(double delta, double grad_norm_star, double L, double Mg);

// Exact inverse of tau: the inner accuracy that realizes outer accuracy eps.
double phi_inverse(double eps, double grad_norm_star, double L, double Mg);

// Halving-radius restart scheme for mu-strongly convex f and g; each restart
// runs the partial adaptive solver on the re-centered, re-scaled problem.
RestartReport run_restarted(const ProblemInstance& inst, double eps, const Vec& x0,
                            double R0_sq);

}  // namespace md
