#pragma once

#include <optional>
#include <string>

#include "md/geometry.hpp"
#include "md/oracles.hpp"

namespace md {

enum class FixtureKind { ActiveLinear, StronglyConvexBall };

struct ProblemInstance {
  ProxSetup setup = ProxSetup::box({-1.0}, {1.0});
  OraclePtr objective;
  OraclePtr constraint;
  double Mg = 0.0;         // Lipschitz constant of g
  double L = 0.0;          // gradient Lipschitz constant of f (0 if unknown)
  double mu = 0.0;         // strong convexity of f and g (0 if not)
  double theta0_sq = 0.0;  // upper bound on d(x*)
  std::optional<Vec> known_solution;
  std::optional<double> known_value;
  std::optional<double> grad_at_solution_norm;  // ||grad f(x*)||*

  int dim() const { return setup.dim(); }
};

// Eigenvalues of a symmetric n x n matrix (row-major), ascending.
// Cyclic Jacobi; exact enough for desk-scale validation.
Vec symmetric_eigenvalues(const std::vector<double>& A, int n);

// Random max-of-quadratics objective (A_i = G_i^T G_i) with a piecewise
// affine constraint on the box [-1,1]^dim. Deterministic in the seed.
ProblemInstance generate_max_quadratic(int dim, int pieces, std::uint64_t seed);

// Analytic fixtures with known optima, used by the theorem checkers.
ProblemInstance make_known_solution_instance(FixtureKind kind);

std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const std::string& text);

void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);

}  // namespace md
