#include "md/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace md {

namespace {
constexpr double kSimplexFloor = 1e-300;
}

ProxSetup ProxSetup::box(Vec lo, Vec hi, Vec dgf_center) {
  if (lo.size() != hi.size() || lo.size() != dgf_center.size() || lo.empty())
    throw std::invalid_argument("box: dimension mismatch");
  require_finite(lo, "box lo");
  require_finite(hi, "box hi");
  require_finite(dgf_center, "box center");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) throw std::invalid_argument("box: lo > hi");
    if (dgf_center[i] < lo[i] || dgf_center[i] > hi[i])
      throw std::invalid_argument("box: d.g.f. center outside the box");
  }
  ProxSetup s;
  s.kind_ = SetupKind::EuclideanBox;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  s.center_ = std::move(dgf_center);
  return s;
}

ProxSetup ProxSetup::box(Vec lo, Vec hi) {
  Vec mid(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
  return box(std::move(lo), std::move(hi), std::move(mid));
}

ProxSetup ProxSetup::ball(Vec center, double radius, Vec dgf_center) {
  if (center.size() != dgf_center.size() || center.empty())
    throw std::invalid_argument("ball: dimension mismatch");
  require_finite(center, "ball center");
  require_finite(dgf_center, "ball d.g.f. center");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("ball: radius must be positive");
  if (norm2(sub(dgf_center, center)) > radius + 1e-12)
    throw std::invalid_argument("ball: d.g.f. center outside the ball");
  ProxSetup s;
  s.kind_ = SetupKind::EuclideanBall;
  s.ball_center_ = std::move(center);
  s.radius_ = radius;
  s.center_ = std::move(dgf_center);
  return s;
}

ProxSetup ProxSetup::ball(Vec center, double radius) {
  Vec c = center;
  return ball(std::move(center), radius, std::move(c));
}

ProxSetup ProxSetup::simplex(int n) {
  if (n < 1) throw std::invalid_argument("simplex: n must be >= 1");
  ProxSetup s;
  s.kind_ = SetupKind::EntropySimplex;
  s.center_.assign(static_cast<std::size_t>(n), 1.0 / n);
  return s;
}

bool ProxSetup::contains(const Vec& x, double tol) const {
  if (static_cast<int>(x.size()) != dim() || !all_finite(x)) return false;
  switch (kind_) {
    case SetupKind::EuclideanBox:
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
      return true;
    case SetupKind::EuclideanBall:
      return norm2(sub(x, ball_center_)) <= radius_ + tol;
    case SetupKind::EntropySimplex: {
      double s = 0.0;
      for (double v : x) {
        if (v < -tol) return false;
        s += v;
      }
      return std::fabs(s - 1.0) <= tol;
    }
  }
  return false;
}

double ProxSetup::norm(const Vec& v) const {
  require_finite(v, "norm");
  return kind_ == SetupKind::EntropySimplex ? norm1(v) : norm2(v);
}

double ProxSetup::dual_norm(const Vec& p) const {
  require_finite(p, "dual_norm");
  return kind_ == SetupKind::EntropySimplex ? norm_inf(p) : norm2(p);
}

double ProxSetup::dgf_value(const Vec& x) const {
  require_finite(x, "dgf_value");
  if (!contains(x))
    throw std::domain_error("dgf_value: point outside the feasible set");
  if (kind_ == SetupKind::EntropySimplex) {
    double s = std::log(static_cast<double>(dim()));
    for (double v : x)
      if (v > 0.0) s += v * std::log(v);
    return s;
  }
  const Vec d = sub(x, center_);
  return 0.5 * dot(d, d);
}

Vec ProxSetup::dgf_grad(const Vec& x) const {
  require_finite(x, "dgf_grad");
  if (kind_ == SetupKind::EntropySimplex) {
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] <= 0.0)
        throw std::domain_error("dgf_grad: entropy gradient undefined on the simplex boundary");
      g[i] = 1.0 + std::log(x[i]);
    }
    return g;
  }
  return sub(x, center_);
}

double ProxSetup::bregman(const Vec& x, const Vec& y) const {
  require_finite(x, "bregman x");
  require_finite(y, "bregman y");
  if (kind_ != SetupKind::EntropySimplex) {
    const Vec d = sub(y, x);
    return 0.5 * dot(d, d);
  }
  // KL form; exact cancellation of the d(y) - d(x) - <grad, y-x> expansion.
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0)
      throw std::domain_error("bregman: entropy divergence undefined for boundary x");
    if (y[i] > 0.0) s += y[i] * std::log(y[i] / x[i]);
  }
  return std::max(s, 0.0);
}

Vec ProxSetup::project(const Vec& y) const {
  require_finite(y, "project");
  switch (kind_) {
    case SetupKind::EuclideanBox: {
      Vec u(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) u[i] = std::clamp(y[i], lo_[i], hi_[i]);
      return u;
    }
    case SetupKind::EuclideanBall: {
      Vec d = sub(y, ball_center_);
      const double n = norm2(d);
      if (n <= radius_) return y;
      return add(ball_center_, scaled(d, radius_ / n));
    }
    case SetupKind::EntropySimplex:
      throw std::domain_error("project: no Euclidean projection for the entropy setup");
  }
  throw std::logic_error("unreachable");
}

Vec ProxSetup::mirror_step(const Vec& x, const Vec& p) const {
  require_finite(p, "mirror_step p");
  require_finite(x, "mirror_step x");
  if (p.size() != x.size() || static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("mirror_step: dimension mismatch");
  if (kind_ != SetupKind::EntropySimplex) return project(sub(x, p));

  // u_i proportional to x_i * exp(-p_i), computed with max-subtraction.
  Vec s(x.size());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[i] = (x[i] > 0.0 ? std::log(x[i]) : std::log(kSimplexFloor)) - p[i];
    m = std::max(m, s[i]);
  }
  Vec u(x.size());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    u[i] = std::exp(s[i] - m);
    z += u[i];
  }
  for (double& v : u) v = std::max(v / z, kSimplexFloor);
  return u;
}

Vec ProxSetup::sample_point(Rng& rng) const {
  switch (kind_) {
    case SetupKind::EuclideanBox: {
      Vec x(lo_.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo_[i], hi_[i]);
      return x;
    }
    case SetupKind::EuclideanBall: {
      Vec d(ball_center_.size());
      for (double& v : d) v = rng.normal();
      const double n = norm2(d);
      const double r = radius_ * std::pow(rng.uniform01(), 1.0 / dim());
      if (n == 0.0) return ball_center_;
      return add(ball_center_, scaled(d, r / n));
    }
    case SetupKind::EntropySimplex: {
      Vec x(center_.size());
      double s = 0.0;
      for (double& v : x) {
        v = -std::log(std::max(rng.uniform01(), 1e-16));
        s += v;
      }
      for (double& v : x) v /= s;
      return x;
    }
  }
  throw std::logic_error("unreachable");
}

double ProxSetup::dgf_max() const {
  switch (kind_) {
    case SetupKind::EuclideanBox: {
      double s = 0.0;
      for (std::size_t i = 0; i < lo_.size(); ++i) {
        const double a = center_[i] - lo_[i];
        const double b = hi_[i] - center_[i];
        const double m = std::max(a, b);
        s += m * m;
      }
      return 0.5 * s;
    }
    case SetupKind::EuclideanBall: {
      const double r = radius_ + norm2(sub(center_, ball_center_));
      return 0.5 * r * r;
    }
    case SetupKind::EntropySimplex:
      return std::log(static_cast<double>(dim()));
  }
  throw std::logic_error("unreachable");
}

}  // namespace md
