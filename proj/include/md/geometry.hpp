#pragma once

#include <cstddef>

#include "md/rng.hpp"
#include "md/vec.hpp"

namespace md {

enum class SetupKind { EuclideanBox, EuclideanBall, EntropySimplex };

// A proximal setup: feasible set, norm pair, distance-generating function and
// its closed-form mirror (prox-mapping) step. Immutable after construction;
// every operation is a pure function.
class ProxSetup {
 public:
  static ProxSetup box(Vec lo, Vec hi, Vec dgf_center);
  static ProxSetup box(Vec lo, Vec hi);  // d.g.f. centered at the midpoint
  static ProxSetup ball(Vec center, double radius);
  static ProxSetup ball(Vec center, double radius, Vec dgf_center);
  static ProxSetup simplex(int n);

  SetupKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(center_.size()); }

  // x0 = argmin_{x in X} d(x)
  const Vec& center() const { return center_; }

  bool contains(const Vec& x, double tol = 1e-9) const;

  double norm(const Vec& v) const;       // the setup norm (l2 or l1)
  double dual_norm(const Vec& p) const;  // its dual (l2 or l-inf)

  double dgf_value(const Vec& x) const;
  Vec dgf_grad(const Vec& x) const;

  // V(x, y) = d(y) - d(x) - <grad d(x), y - x>
  double bregman(const Vec& x, const Vec& y) const;

  // argmin_{u in X} { <p, u> + V(x, u) }
  Vec mirror_step(const Vec& x, const Vec& p) const;

  // Euclidean projection onto X (box clamp / radial); entropy setup has no
  // Euclidean projection here.
  Vec project(const Vec& y) const;

  Vec sample_point(Rng& rng) const;

  // max_{x in X} d(x); closed form for box/ball, ln n for the simplex.
  double dgf_max() const;

  const Vec& box_lo() const { return lo_; }
  const Vec& box_hi() const { return hi_; }
  const Vec& ball_center() const { return ball_center_; }
  double ball_radius() const { return radius_; }

 private:
  ProxSetup() = default;

  SetupKind kind_ = SetupKind::EuclideanBox;
  Vec center_;
  Vec lo_, hi_;      // box
  Vec ball_center_;  // ball
  double radius_ = 0.0;
};

}  // namespace md
