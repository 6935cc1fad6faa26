#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "md/geometry.hpp"
#include "md/vec.hpp"

namespace md {

// Value + subgradient evaluator for a convex functional. Immutable;
// evaluations are pure.
class ConvexOracle {
 public:
  virtual ~ConvexOracle() = default;

  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec subgradient(const Vec& x) const = 0;

  // Index of the piece achieving the max (lowest index on ties); 0 for
  // single-piece / smooth oracles.
  virtual int active_index(const Vec& /*x*/) const { return 0; }

  // Gap between the best and second-best piece value; +inf when there is a
  // single piece. Used to detect kinks before finite differencing.
  virtual double tie_gap(const Vec& /*x*/) const {
    return std::numeric_limits<double>::infinity();
  }
};

using OraclePtr = std::shared_ptr<const ConvexOracle>;

// f(x) = max_i { 1/2 <A_i x, x> - <b_i, x> + alpha_i }, A_i symmetric PSD.
class MaxOfQuadratics final : public ConvexOracle {
 public:
  struct Piece {
    std::vector<double> A;  // n*n, row-major
    Vec b;
    double alpha = 0.0;
  };

  MaxOfQuadratics(int n, std::vector<Piece> pieces);

  int dim() const override { return n_; }
  double value(const Vec& x) const override;
  Vec subgradient(const Vec& x) const override;
  int active_index(const Vec& x) const override;
  double tie_gap(const Vec& x) const override;

  int piece_count() const { return static_cast<int>(pieces_.size()); }
  const Piece& piece(int i) const { return pieces_[static_cast<std::size_t>(i)]; }
  double piece_value(int i, const Vec& x) const;
  Vec piece_gradient(int i, const Vec& x) const;

 private:
  int n_;
  std::vector<Piece> pieces_;
};

// g(x) = max_j { <c_j, x> + d_j }
class PiecewiseMaxAffine final : public ConvexOracle {
 public:
  PiecewiseMaxAffine(std::vector<Vec> rows, Vec offsets);

  int dim() const override { return static_cast<int>(rows_.front().size()); }
  double value(const Vec& x) const override;
  Vec subgradient(const Vec& x) const override;
  int active_index(const Vec& x) const override;
  double tie_gap(const Vec& x) const override;

  int piece_count() const { return static_cast<int>(rows_.size()); }
  const Vec& row(int j) const { return rows_[static_cast<std::size_t>(j)]; }
  double offset(int j) const { return offsets_[static_cast<std::size_t>(j)]; }

  // Analytic Lipschitz constant max_j ||c_j||* in the setup's norm pair.
  double lipschitz_const(const ProxSetup& setup) const;

 private:
  std::vector<Vec> rows_;
  Vec offsets_;
};

// base(x) + (mu/2) ||x - center||_2^2, applied to value and subgradient.
class StronglyConvexAugmented final : public ConvexOracle {
 public:
  StronglyConvexAugmented(OraclePtr base, double mu, Vec center);

  int dim() const override { return base_->dim(); }
  double value(const Vec& x) const override;
  Vec subgradient(const Vec& x) const override;
  int active_index(const Vec& x) const override { return base_->active_index(x); }
  double tie_gap(const Vec& x) const override { return base_->tie_gap(x); }

 private:
  OraclePtr base_;
  double mu_;
  Vec center_;
};

// <grad f(x)/||grad f(x)||*, x - y>, or 0 when the subgradient vanishes.
double v_f(const ConvexOracle& oracle, const ProxSetup& setup, const Vec& x, const Vec& y);

// Max coordinate error of a central difference against the reported
// subgradient; nullopt when the achieving piece changes within the stencil
// (non-differentiable point).
std::optional<double> check_gradient_fd(const ConvexOracle& oracle, const Vec& x, double h);

struct LipschitzEstimate {
  double M_est = 0.0;  // value ratios
  double L_est = 0.0;  // gradient ratios
};

// Sampled lower bounds on the value- and gradient-Lipschitz constants over
// random feasible pairs.
LipschitzEstimate estimate_lipschitz_constants(const ConvexOracle& oracle,
                                               const ProxSetup& setup, int samples,
                                               std::uint64_t seed = 12345);

}  // namespace md
