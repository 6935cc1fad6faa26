#include <doctest.h>

#include <cmath>

#include "md/geometry.hpp"
#include "md/rng.hpp"

using namespace md;

namespace {

// Independent KL oracle: sum y_i ln(y_i / x_i), evaluated directly.
double kl_direct(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > 0.0) s += y[i] * std::log(y[i] / x[i]);
  return s;
}

ProxSetup unit_box2() { return ProxSetup::box({-10.0, -10.0}, {10.0, 10.0}, {0.0, 0.0}); }

}  // namespace

TEST_CASE("dgf_value closed forms") {
  auto euc = unit_box2();
  CHECK(euc.dgf_value({3.0, 4.0}) == doctest::Approx(12.5).epsilon(1e-14));
  CHECK(euc.dgf_value(euc.center()) == 0.0);

  auto sim = ProxSetup::simplex(2);
  CHECK(sim.dgf_value({0.5, 0.5}) == doctest::Approx(0.0).epsilon(1e-15));
  // boundary point contributes 0 * ln 0 = 0
  CHECK(sim.dgf_value({1.0, 0.0}) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(euc.dgf_value({100.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(euc.dgf_value({std::nan(""), 0.0}), std::invalid_argument);
}

TEST_CASE("dual norms") {
  auto euc = unit_box2();
  CHECK(euc.dual_norm({3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(euc.dual_norm({0.0, 0.0}) == 0.0);
  auto sim = ProxSetup::simplex(2);
  CHECK(sim.dual_norm({1.0, -7.0}) == doctest::Approx(7.0));
  CHECK(sim.dual_norm({0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(euc.dual_norm({1.0, std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
}

TEST_CASE("bregman divergence") {
  auto euc = unit_box2();
  CHECK(euc.bregman({0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(12.5));
  CHECK(euc.bregman({1.0, 2.0}, {1.0, 2.0}) == 0.0);

  auto sim = ProxSetup::simplex(2);
  const Vec x{0.5, 0.5}, y{0.25, 0.75};
  CHECK(sim.bregman(x, y) == doctest::Approx(kl_direct(x, y)).epsilon(1e-12));
  CHECK(sim.bregman(x, y) == doctest::Approx(0.13081203594113694).epsilon(1e-10));
  CHECK(sim.bregman(x, x) == 0.0);
  CHECK_THROWS_AS(sim.bregman({1.0, 0.0}, x), std::domain_error);
}

TEST_CASE("mirror step closed forms") {
  auto big = unit_box2();
  Vec u = big.mirror_step({1.0, 1.0}, {0.5, 0.0});
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(1.0));

  auto unit = ProxSetup::box({0.0, 0.0}, {1.0, 1.0});
  u = unit.mirror_step({0.2, 0.2}, {1.0, 0.0});
  CHECK(u[0] == 0.0);
  CHECK(u[1] == doctest::Approx(0.2));

  auto sim = ProxSetup::simplex(2);
  u = sim.mirror_step({0.5, 0.5}, {0.0, 0.0});
  CHECK(u[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(big.mirror_step({0.0, 0.0}, {std::nan(""), 0.0}), std::invalid_argument);

  // overflow safety of the exponentiated step
  u = sim.mirror_step({0.5, 0.5}, {-2000.0, 2000.0});
  CHECK(u[0] + u[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u[0] == doctest::Approx(1.0));
}

TEST_CASE("strong convexity and center optimality of the d.g.f. (sampled)") {
  Rng rng(11);
  const ProxSetup setups[] = {unit_box2(), ProxSetup::ball({1.0, -1.0, 0.5}, 2.0),
                              ProxSetup::simplex(4)};
  for (const auto& s : setups) {
    const double d_center = s.dgf_value(s.center());
    for (int t = 0; t < 300; ++t) {
      Vec x = s.sample_point(rng);
      Vec y = s.sample_point(rng);
      CHECK(s.dgf_value(x) >= d_center - 1e-12);
      if (s.kind() == SetupKind::EntropySimplex) {
        // keep off the boundary for the gradient
        for (double& v : x) v = std::max(v, 1e-9);
        for (double& v : y) v = std::max(v, 1e-9);
      }
      const double lhs = dot(sub(s.dgf_grad(x), s.dgf_grad(y)), sub(x, y));
      const double nrm = s.norm(sub(x, y));
      CHECK(lhs >= nrm * nrm - 1e-9);
    }
  }
}

TEST_CASE("bregman lower bound V(x,y) >= 1/2 ||y-x||^2 (1000 pairs per setup)") {
  Rng rng(22);
  const ProxSetup setups[] = {unit_box2(), ProxSetup::ball({0.0, 0.0}, 1.5),
                              ProxSetup::simplex(3)};
  for (const auto& s : setups) {
    for (int t = 0; t < 1000; ++t) {
      Vec x = s.sample_point(rng);
      Vec y = s.sample_point(rng);
      if (s.kind() == SetupKind::EntropySimplex)
        for (double& v : x) v = std::max(v, 1e-12);
      const double n = s.norm(sub(x, y));
      CHECK(s.bregman(x, y) >= 0.5 * n * n - 1e-10);
    }
  }
}

TEST_CASE("euclidean mirror step equals euclidean projection") {
  Rng rng(33);
  const ProxSetup setups[] = {ProxSetup::box({-1.0, 0.0}, {2.0, 3.0}),
                              ProxSetup::ball({0.5, -0.5}, 1.0)};
  for (const auto& s : setups) {
    for (int t = 0; t < 500; ++t) {
      Vec x = s.sample_point(rng);
      Vec p = {4.0 * rng.normal(), 4.0 * rng.normal()};
      Vec via_mirror = s.mirror_step(x, p);
      Vec via_proj = s.project(sub(x, p));
      for (std::size_t i = 0; i < via_mirror.size(); ++i)
        CHECK(via_mirror[i] == doctest::Approx(via_proj[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mirror step output stays feasible") {
  Rng rng(44);
  const ProxSetup setups[] = {unit_box2(), ProxSetup::ball({0.0, 0.0}, 1.0),
                              ProxSetup::simplex(5)};
  for (const auto& s : setups) {
    for (int t = 0; t < 500; ++t) {
      Vec x = s.sample_point(rng);
      if (s.kind() == SetupKind::EntropySimplex)
        for (double& v : x) v = std::max(v, 1e-12);
      Vec p(static_cast<std::size_t>(s.dim()));
      for (double& v : p) v = 3.0 * rng.normal();
      Vec u = s.mirror_step(x, p);
      CHECK(s.contains(u, 1e-12));
      if (s.kind() == SetupKind::EntropySimplex) {
        double sum = 0.0;
        for (double v : u) sum += v;
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("prox step first-order optimality (sampled)") {
  Rng rng(55);
  const ProxSetup setups[] = {unit_box2(), ProxSetup::ball({0.0, 0.0}, 1.0),
                              ProxSetup::simplex(3)};
  for (const auto& s : setups) {
    for (int t = 0; t < 200; ++t) {
      Vec x = s.sample_point(rng);
      if (s.kind() == SetupKind::EntropySimplex)
        for (double& v : x) v = std::max(v, 1e-9);
      Vec p(static_cast<std::size_t>(s.dim()));
      for (double& v : p) v = rng.normal();
      const Vec m = s.mirror_step(x, p);
      // <p + grad d(m) - grad d(x), u - m> >= 0 for all feasible u
      Vec lambda = add(p, sub(s.dgf_grad(m), s.dgf_grad(x)));
      for (int r = 0; r < 20; ++r) {
        Vec u = s.sample_point(rng);
        CHECK(dot(lambda, sub(u, m)) >= -1e-8);
      }
    }
  }
}
