#include "md/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "md/errors.hpp"

namespace md {

namespace {

constexpr double kFeasTol = 1e-12;

double set_diameter(const ProxSetup& s) {
  switch (s.kind()) {
    case SetupKind::EuclideanBox:
      return norm2(sub(s.box_hi(), s.box_lo()));
    case SetupKind::EuclideanBall:
      return 2.0 * s.ball_radius();
    case SetupKind::EntropySimplex:
      return 2.0;
  }
  return 1.0;
}

Vec feasible_move(const ProxSetup& s, const Vec& from, const Vec& dir, double w) {
  if (s.kind() != SetupKind::EntropySimplex) {
    Vec y(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) y[i] = from[i] + w * dir[i];
    return s.project(y);
  }
  Vec y(from.size());
  double z = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    y[i] = std::max(from[i] + w * dir[i], 1e-300);
    z += y[i];
  }
  for (double& v : y) v /= z;
  return y;
}

std::vector<Vec> pattern_directions(int n) {
  std::vector<Vec> dirs;
  if (n <= 4) {
    // all nonzero sign patterns, normalized
    const long total = static_cast<long>(std::pow(3.0, n));
    for (long code = 1; code < total; ++code) {
      Vec d(static_cast<std::size_t>(n), 0.0);
      long c = code;
      bool nonzero = false;
      for (int i = 0; i < n; ++i) {
        const int t = static_cast<int>(c % 3);
        c /= 3;
        if (t == 1) d[static_cast<std::size_t>(i)] = 1.0;
        if (t == 2) d[static_cast<std::size_t>(i)] = -1.0;
        nonzero = nonzero || t != 0;
      }
      if (!nonzero) continue;
      const double nn = norm2(d);
      for (double& v : d) v /= nn;
      dirs.push_back(std::move(d));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      Vec d(static_cast<std::size_t>(n), 0.0);
      d[static_cast<std::size_t>(i)] = 1.0;
      dirs.push_back(d);
      d[static_cast<std::size_t>(i)] = -1.0;
      dirs.push_back(std::move(d));
    }
  }
  return dirs;
}

}  // namespace

ReferenceSolution reference_solve(const ProblemInstance& inst, long long budget) {
  if (inst.dim() > 10)
    throw std::invalid_argument("reference_solve: desk scale only (dim <= 10)");
  if (budget < 100) throw std::invalid_argument("reference_solve: budget too small");

  const ProxSetup& setup = inst.setup;
  const ConvexOracle& f = *inst.objective;
  const ConvexOracle& g = *inst.constraint;
  const double D = set_diameter(setup);

  Vec x = setup.center();
  double f_best = std::numeric_limits<double>::infinity();
  Vec x_best = x;
  auto consider = [&](const Vec& y) {
    if (g.value(y) <= kFeasTol) {
      const double fy = f.value(y);
      if (fy < f_best) {
        f_best = fy;
        x_best = y;
      }
    }
  };
  consider(x);

  // Phase 1: diminishing-step subgradient descent on max{f - f_best, g}.
  for (long long t = 0; t < budget; ++t) {
    consider(x);
    Vec s;
    if (!std::isfinite(f_best) || g.value(x) >= f.value(x) - f_best) {
      s = g.subgradient(x);
    } else {
      s = f.subgradient(x);
    }
    const double sn = setup.dual_norm(s);
    if (sn == 0.0) break;
    const double h = D / std::sqrt(static_cast<double>(t) + 1.0);
    x = setup.mirror_step(x, scaled(s, h / sn));
  }
  consider(x);
  if (!std::isfinite(f_best)) {
    // never saw a feasible point; fall back to the least-infeasible iterate
    return {x, f.value(x), std::numeric_limits<double>::infinity()};
  }

  // Phase 2: shrinking pattern search on the level form, re-leveled each
  // round at the best feasible value found so far.
  const auto dirs = pattern_directions(inst.dim());
  double last_improvement = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 60; ++round) {
    const double level = f_best;
    Vec c = x_best;
    auto level_val = [&](const Vec& y) {
      return std::max(f.value(y) - level, g.value(y));
    };
    double fc = level_val(c);
    for (double w = D / 4.0; w > 1e-14; w *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (const Vec& d : dirs) {
          const Vec y = feasible_move(setup, c, d, w);
          const double fy = level_val(y);
          if (fy < fc - 1e-18) {
            c = y;
            fc = fy;
            consider(y);
            improved = true;
          }
        }
      }
    }
    consider(c);
    last_improvement = level - f_best;
    if (last_improvement <= 1e-15 * (1.0 + std::fabs(f_best))) break;
  }
  return {x_best, f_best, std::max(last_improvement, 0.0)};
}

double estimate_omega(const ProblemInstance& inst, double tau, int grid) {
  if (!inst.known_solution)
    throw std::invalid_argument("estimate_omega: known solution required");
  if (inst.dim() > 3)
    throw std::invalid_argument("estimate_omega: grid search limited to dim <= 3");
  if (tau < 0.0) throw std::invalid_argument("estimate_omega: tau must be >= 0");
  if (grid < 2) throw std::invalid_argument("estimate_omega: grid too coarse");
  const Vec& xs = *inst.known_solution;
  const double f_star = inst.objective->value(xs);
  if (tau == 0.0) return 0.0;

  const int n = inst.dim();
  const ProxSetup& setup = inst.setup;

  auto scan = [&](const Vec& lo, const Vec& hi, Vec& argmax) {
    double best = 0.0;
    Vec x(static_cast<std::size_t>(n));
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    const long long total = [&] {
      long long t = 1;
      for (int i = 0; i < n; ++i) t *= grid;
      return t;
    }();
    for (long long c = 0; c < total; ++c) {
      long long r = c;
      for (int i = 0; i < n; ++i) {
        const int k = static_cast<int>(r % grid);
        r /= grid;
        x[static_cast<std::size_t>(i)] =
            lo[static_cast<std::size_t>(i)] +
            (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) * k /
                (grid - 1);
      }
      if (!setup.contains(x, 1e-12)) continue;
      if (setup.norm(sub(x, xs)) > tau) continue;
      const double v = inst.objective->value(x) - f_star;
      if (v > best) {
        best = v;
        argmax = x;
      }
    }
    return best;
  };

  Vec lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    lo[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(i)] - tau;
    hi[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(i)] + tau;
  }
  Vec argmax = xs;
  double best = scan(lo, hi, argmax);

  // one refinement pass around the argmax
  const double spacing = 2.0 * tau / (grid - 1);
  for (int i = 0; i < n; ++i) {
    lo[static_cast<std::size_t>(i)] = argmax[static_cast<std::size_t>(i)] - spacing;
    hi[static_cast<std::size_t>(i)] = argmax[static_cast<std::size_t>(i)] + spacing;
  }
  Vec argmax2 = argmax;
  best = std::max(best, scan(lo, hi, argmax2));
  return best;
}

CheckReport check_md_step_inequality(const SolveTrace& trace, const ProblemInstance& inst) {
  if (!inst.known_solution)
    throw std::invalid_argument("check_md_step_inequality: known solution required");
  if (trace.points.size() != trace.steps.size() + 1 ||
      trace.grads.size() != trace.steps.size())
    throw std::invalid_argument("check_md_step_inequality: trace lacks retained iterates");

  const Vec& xs = *inst.known_solution;
  CheckReport rep;
  rep.name = "md_step_inequality";
  double max_res = -std::numeric_limits<double>::infinity();
  double scale = 0.0;
  int worst_k = -1;
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const StepRecord& s = trace.steps[k];
    const double lhs = s.h * dot(trace.grads[k], sub(trace.points[k], xs));
    const double vk = inst.setup.bregman(trace.points[k], xs);
    const double vk1 = inst.setup.bregman(trace.points[k + 1], xs);
    const double quad = 0.5 * s.h * s.h * s.grad_dual_norm * s.grad_dual_norm;
    const double res = lhs - quad - vk + vk1;
    scale = std::max(scale, std::fabs(lhs) + quad + vk + vk1);
    if (res > max_res) {
      max_res = res;
      worst_k = static_cast<int>(k);
    }
  }
  rep.lhs = max_res;
  rep.rhs = 1e-8 * (1.0 + scale);
  rep.margin = rep.rhs - rep.lhs;
  rep.passed = trace.steps.empty() || max_res <= rep.rhs;
  rep.details = trace.steps.empty()
                    ? "empty trace"
                    : "max residual at step " + std::to_string(worst_k);
  return rep;
}

CheckReport check_gap_bound(const SolveTrace& trace, const ProblemInstance& inst, double eps) {
  if (!inst.known_solution || !inst.known_value || !inst.grad_at_solution_norm)
    throw std::invalid_argument("check_gap_bound: known solution metadata required");
  if (!(inst.Mg > 0.0) || inst.L < 0.0)
    throw std::invalid_argument("check_gap_bound: Mg and L required");
  if (!trace.best_productive_index)
    throw std::invalid_argument("check_gap_bound: trace has no productive iterate");

  CheckReport rep;
  rep.name = "gap_bound";
  rep.lhs = trace.output_value - *inst.known_value;
  rep.rhs = *inst.grad_at_solution_norm * eps / inst.Mg +
            inst.L * eps * eps / (2.0 * inst.Mg * inst.Mg) + 1e-9;
  rep.margin = rep.rhs - rep.lhs;
  rep.passed = rep.lhs <= rep.rhs;
  rep.details = "f(xbar) - f* vs eps_f + L eps^2 / (2 Mg^2)";
  return rep;
}

CheckReport check_strong_convexity_localization(const Vec& x, const ProblemInstance& inst,
                                                double eps_f, double eps_g) {
  if (!(inst.mu > 0.0))
    throw std::invalid_argument("check_strong_convexity_localization: mu > 0 required");
  if (!inst.known_solution || !inst.known_value)
    throw std::invalid_argument("check_strong_convexity_localization: known solution required");

  CheckReport rep;
  rep.name = "strong_convexity_localization";
  const double f_gap = inst.objective->value(x) - *inst.known_value;
  const double g_val = inst.constraint->value(x);
  if (f_gap > eps_f + 1e-9 || g_val > eps_g + 1e-9) {
    rep.applicable = false;
    rep.passed = true;
    rep.details = "premises not met: f-gap=" + format_real(f_gap) +
                  ", g=" + format_real(g_val);
    return rep;
  }
  const Vec d = sub(x, *inst.known_solution);
  rep.lhs = 0.5 * inst.mu * inst.setup.norm(d) * inst.setup.norm(d);
  rep.rhs = std::max(eps_f, eps_g) + 1e-9;
  rep.margin = rep.rhs - rep.lhs;
  rep.passed = rep.lhs <= rep.rhs;
  rep.details = "mu/2 ||x - x*||^2 vs max{eps_f, eps_g}";
  return rep;
}

}  // namespace md
