#include "md/solvers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "md/errors.hpp"

namespace md {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Ceiling with a one-ulp-scale guard so that analytically integral bounds
// (e.g. 2 Mg^2 Theta0^2 / eps^2 = 100) do not round up to 101.
int ceil_count(double v) {
  if (!(v > 0.0)) throw std::invalid_argument("iteration bound: nonpositive value");
  if (v > 2.0e9) throw std::invalid_argument("iteration bound overflows the step counter");
  return static_cast<int>(std::ceil(v * (1.0 - 4.0 * std::numeric_limits<double>::epsilon())));
}

double lemma1_residual(const ProxSetup& setup, const Vec& x, const Vec& x_next,
                       const Vec& grad, double h, double grad_dual_norm,
                       const std::optional<Vec>& x_star) {
  if (!x_star) return kNaN;
  const double lhs = h * dot(grad, sub(x, *x_star));
  const double rhs = 0.5 * h * h * grad_dual_norm * grad_dual_norm +
                     setup.bregman(x, *x_star) - setup.bregman(x_next, *x_star);
  return lhs - rhs;
}

void finalize_output(SolveTrace& trace) {
  if (trace.best_productive_index) {
    trace.output_point = trace.points[static_cast<std::size_t>(*trace.best_productive_index)];
  } else {
    trace.output_point = trace.points.back();
    trace.output_value = kNaN;
  }
}

// One switching step shared by both solvers. Returns the next point.
struct StepResult {
  Vec x_next;
  StepRecord rec;
  Vec grad;
};

StepResult switching_step(const ProblemInstance& inst, const Vec& x, int k, double eps,
                          bool partial) {
  StepResult r;
  r.rec.k = k;
  r.rec.g_value = inst.constraint->value(x);
  r.rec.f_value = inst.objective->value(x);
  if (r.rec.g_value <= eps) {
    r.rec.kind = StepKind::Productive;
    r.grad = inst.objective->subgradient(x);
    r.rec.grad_dual_norm = inst.setup.dual_norm(r.grad);
    if (r.rec.grad_dual_norm == 0.0) {
      // grad f = 0 certifies a global minimizer of f; take a zero step and
      // keep the index productive (v_f = 0 already meets the guarantee).
      r.rec.h = 0.0;
      r.x_next = x;
    } else {
      r.rec.h = partial ? eps / (inst.Mg * r.rec.grad_dual_norm)
                        : eps / r.rec.grad_dual_norm;
      r.x_next = inst.setup.mirror_step(x, scaled(r.grad, r.rec.h));
    }
  } else {
    r.rec.kind = StepKind::NonProductive;
    r.grad = inst.constraint->subgradient(x);
    r.rec.grad_dual_norm = inst.setup.dual_norm(r.grad);
    if (r.rec.grad_dual_norm == 0.0)
      throw InvariantViolation(
          "non-productive step with zero constraint subgradient: g > eps > 0 "
          "contradicts convexity of a feasible instance");
    r.rec.h = partial ? eps / (inst.Mg * inst.Mg)
                      : eps / (r.rec.grad_dual_norm * r.rec.grad_dual_norm);
    r.x_next = inst.setup.mirror_step(x, scaled(r.grad, r.rec.h));
  }
  r.rec.lemma1_residual = lemma1_residual(inst.setup, x, r.x_next, r.grad, r.rec.h,
                                          r.rec.grad_dual_norm, inst.known_solution);
  return r;
}

void push_step(SolveTrace& trace, StepResult&& s) {
  if (s.rec.kind == StepKind::Productive) {
    ++trace.productive_count;
    if (!trace.best_productive_index || s.rec.f_value < trace.output_value) {
      trace.best_productive_index = s.rec.k;
      trace.output_value = s.rec.f_value;
    }
  } else {
    ++trace.nonproductive_count;
  }
  trace.steps.push_back(s.rec);
  trace.grads.push_back(std::move(s.grad));
  trace.points.push_back(std::move(s.x_next));
}

}  // namespace

int iteration_bound_adaptive(double Mg, double theta0_sq, double eps) {
  if (!(Mg > 0.0) || !(theta0_sq > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("iteration_bound_adaptive: inputs must be positive");
  return ceil_count(2.0 * std::max(1.0, Mg * Mg) * theta0_sq / (eps * eps));
}

int iteration_bound_partial(double Mg, double theta0_sq, double eps) {
  if (!(Mg > 0.0) || !(theta0_sq > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("iteration_bound_partial: inputs must be positive");
  return ceil_count(2.0 * Mg * Mg * theta0_sq / (eps * eps));
}

SolveTrace run_adaptive(const ProblemInstance& inst, double eps, int cap) {
  if (!(eps > 0.0)) throw std::invalid_argument("run_adaptive: eps must be positive");
  if (cap < 1) throw std::invalid_argument("run_adaptive: cap must be >= 1");

  SolveTrace trace;
  Vec x = inst.setup.center();
  trace.points.push_back(x);

  double criterion_sum = 0.0;  // (eps^2/2)|I| + sum_J eps^2 / (2 ||grad g||*^2)
  trace.stop_reason = StopReason::CapReached;
  for (int k = 0; k < cap; ++k) {
    StepResult s = switching_step(inst, x, k, eps, /*partial=*/false);
    if (s.rec.kind == StepKind::Productive) {
      criterion_sum += 0.5 * eps * eps;
    } else {
      criterion_sum += 0.5 * eps * eps / (s.rec.grad_dual_norm * s.rec.grad_dual_norm);
    }
    x = s.x_next;
    push_step(trace, std::move(s));
    if (inst.theta0_sq <= criterion_sum) {
      trace.stop_reason = StopReason::CriterionMet;
      break;
    }
  }
  finalize_output(trace);
  return trace;
}

SolveTrace run_partial_adaptive(const ProblemInstance& inst, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("run_partial_adaptive: eps must be positive");
  if (!(inst.Mg > 0.0)) throw std::invalid_argument("run_partial_adaptive: Mg must be positive");

  const int n_steps = iteration_bound_partial(inst.Mg, inst.theta0_sq, eps);
  SolveTrace trace;
  trace.stop_reason = StopReason::FixedBudget;
  Vec x = inst.setup.center();
  trace.points.push_back(x);
  for (int k = 0; k < n_steps; ++k) {
    StepResult s = switching_step(inst, x, k, eps, /*partial=*/true);
    x = s.x_next;
    push_step(trace, std::move(s));
  }
  if (trace.productive_count == 0)
    throw InvariantViolation(
        "partial adaptive run finished with no productive step; the fixed-budget "
        "guarantee requires |I| >= 1 (check Mg and Theta0^2)");
  finalize_output(trace);
  return trace;
}

double tau_of_delta(double delta, double grad_norm_star, double L, double Mg) {
  return std::max(delta * grad_norm_star + 0.5 * delta * delta * L, delta * Mg);
}

double phi_inverse(double eps, double grad_norm_star, double L, double Mg) {
  if (!(eps > 0.0)) throw std::invalid_argument("phi_inverse: eps must be positive");
  if (grad_norm_star < 0.0 || L < 0.0 || Mg < 0.0)
    throw std::invalid_argument("phi_inverse: constants must be nonnegative");
  const double inf = std::numeric_limits<double>::infinity();
  // Inverse of delta -> delta g* + delta^2 L / 2, in cancellation-free form.
  double a_inv;
  if (L > 0.0) {
    a_inv = 2.0 * eps / (std::sqrt(grad_norm_star * grad_norm_star + 2.0 * eps * L) +
                         grad_norm_star);
  } else if (grad_norm_star > 0.0) {
    a_inv = eps / grad_norm_star;
  } else {
    a_inv = inf;
  }
  const double b_inv = Mg > 0.0 ? eps / Mg : inf;
  const double phi = std::min(a_inv, b_inv);
  if (!std::isfinite(phi))
    throw std::domain_error("phi_inverse: degenerate (grad norm, L and Mg all zero)");
  return phi;
}

namespace {

// Oracle in the restart's normalized coordinates y = (x - anchor) / scale.
class RescaledOracle final : public ConvexOracle {
 public:
  RescaledOracle(OraclePtr base, Vec anchor, double scale)
      : base_(std::move(base)), anchor_(std::move(anchor)), scale_(scale) {}

  int dim() const override { return base_->dim(); }
  double value(const Vec& y) const override { return base_->value(to_x(y)); }
  Vec subgradient(const Vec& y) const override {
    return scaled(base_->subgradient(to_x(y)), scale_);
  }
  int active_index(const Vec& y) const override { return base_->active_index(to_x(y)); }
  double tie_gap(const Vec& y) const override { return base_->tie_gap(to_x(y)); }

 private:
  Vec to_x(const Vec& y) const { return add(anchor_, scaled(y, scale_)); }

  OraclePtr base_;
  Vec anchor_;
  double scale_;
};

ProxSetup rescale_setup(const ProxSetup& setup, const Vec& anchor, double scale) {
  const int n = setup.dim();
  switch (setup.kind()) {
    case SetupKind::EuclideanBox: {
      Vec lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        lo[static_cast<std::size_t>(i)] = (setup.box_lo()[static_cast<std::size_t>(i)] -
                                           anchor[static_cast<std::size_t>(i)]) / scale;
        hi[static_cast<std::size_t>(i)] = (setup.box_hi()[static_cast<std::size_t>(i)] -
                                           anchor[static_cast<std::size_t>(i)]) / scale;
      }
      return ProxSetup::box(std::move(lo), std::move(hi), Vec(static_cast<std::size_t>(n), 0.0));
    }
    case SetupKind::EuclideanBall:
      return ProxSetup::ball(scaled(sub(setup.ball_center(), anchor), 1.0 / scale),
                             setup.ball_radius() / scale,
                             Vec(static_cast<std::size_t>(n), 0.0));
    case SetupKind::EntropySimplex:
      throw std::invalid_argument(
          "run_restarted: the entropy setup has no closed-form rescaled prox step");
  }
  throw std::logic_error("unreachable");
}

// Sampled upper bound on ||grad f||* over X, used when ||grad f(x*)||* is
// not stored with the instance.
double sampled_grad_bound(const ProblemInstance& inst) {
  Rng rng(987654321u);
  double m = 0.0;
  for (int s = 0; s < 2000; ++s) {
    const Vec x = inst.setup.sample_point(rng);
    m = std::max(m, inst.setup.dual_norm(inst.objective->subgradient(x)));
  }
  return m;
}

}  // namespace

RestartReport run_restarted(const ProblemInstance& inst, double eps, const Vec& x0,
                            double R0_sq) {
  if (!(inst.mu > 0.0))
    throw std::invalid_argument("run_restarted: instance must be strongly convex (mu > 0)");
  if (!(eps > 0.0)) throw std::invalid_argument("run_restarted: eps must be positive");
  if (!(R0_sq > 0.0)) throw std::invalid_argument("run_restarted: R0_sq must be positive");
  if (!inst.setup.contains(x0))
    throw std::invalid_argument("run_restarted: x0 outside the feasible set");

  RestartReport report;
  report.final_point = x0;
  report.p_hat =
      std::max(0, static_cast<int>(std::ceil(std::log2(inst.mu * R0_sq / (2.0 * eps)))));
  if (report.p_hat == 0) return report;  // x0 already meets the target radius

  const double grad_star =
      inst.grad_at_solution_norm ? *inst.grad_at_solution_norm : sampled_grad_bound(inst);
  // Euclidean d is bounded by 1/2 on the unit ball.
  const double theta0_sq_unit = 0.5;

  Vec x = x0;
  double R_prev_sq = R0_sq;
  for (int p = 1; p <= report.p_hat; ++p) {
    RestartRecord rec;
    rec.p = p;
    rec.R_p_sq = R0_sq * std::pow(2.0, -p);
    rec.eps_p = 0.5 * inst.mu * rec.R_p_sq;
    rec.inner_accuracy = phi_inverse(rec.eps_p, grad_star, inst.L, inst.Mg);

    const double R = std::sqrt(R_prev_sq);
    ProblemInstance inner;
    inner.setup = rescale_setup(inst.setup, x, R);
    inner.objective = std::make_shared<RescaledOracle>(inst.objective, x, R);
    inner.constraint = std::make_shared<RescaledOracle>(inst.constraint, x, R);
    inner.Mg = inst.Mg * R;
    inner.L = inst.L * R * R;
    inner.theta0_sq = theta0_sq_unit;
    if (inst.known_solution)
      inner.known_solution = scaled(sub(*inst.known_solution, x), 1.0 / R);

    SolveTrace trace = run_partial_adaptive(inner, rec.inner_accuracy);
    rec.inner_iterations = trace.total_steps();
    x = add(x, scaled(trace.output_point, R));
    rec.x_p = x;
    R_prev_sq = rec.R_p_sq;
    report.restarts.push_back(std::move(rec));
  }
  report.final_point = x;
  return report;
}

}  // namespace md
