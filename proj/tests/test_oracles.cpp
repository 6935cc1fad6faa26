#include <doctest.h>

#include <cmath>
#include <memory>

#include "md/instances.hpp"
#include "md/oracles.hpp"

using namespace md;

namespace {

std::shared_ptr<MaxOfQuadratics> half_norm_sq() {
  return std::make_shared<MaxOfQuadratics>(
      2, std::vector<MaxOfQuadratics::Piece>{{{1.0, 0.0, 0.0, 1.0}, {0.0, 0.0}, 0.0}});
}

std::shared_ptr<PiecewiseMaxAffine> two_coords() {
  return std::make_shared<PiecewiseMaxAffine>(std::vector<Vec>{{1.0, 0.0}, {0.0, 1.0}},
                                              Vec{0.0, 0.0});
}

}  // namespace

TEST_CASE("subgradient selection and tie-break") {
  auto q = half_norm_sq();
  Vec g = q->subgradient({2.0, 3.0});
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(3.0));

  auto a = two_coords();
  g = a->subgradient({2.0, 1.0});
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 0.0);
  // exact tie resolves to the lowest achieving index
  g = a->subgradient({1.0, 1.0});
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 0.0);
  CHECK(a->active_index({1.0, 1.0}) == 0);
  CHECK(a->tie_gap({1.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(a->subgradient({std::nan(""), 0.0}), std::invalid_argument);
}

TEST_CASE("v_f definition") {
  auto setup = ProxSetup::box({-10.0, -10.0}, {10.0, 10.0}, {0.0, 0.0});
  // grad f(x) = (3,4) at x = (3,4) for f = 1/2||x||^2; x - y = (1,0)
  auto q = half_norm_sq();
  const Vec x{3.0, 4.0}, y{2.0, 4.0};
  CHECK(v_f(*q, setup, x, y) == doctest::Approx(0.6));
  CHECK(v_f(*q, setup, x, x) == 0.0);
  // zero-gradient branch
  CHECK(v_f(*q, setup, {0.0, 0.0}, {5.0, 5.0}) == 0.0);
}

TEST_CASE("finite difference gradient check") {
  auto q = half_norm_sq();
  auto err = check_gradient_fd(*q, {1.0, 2.0}, 1e-4);
  REQUIRE(err.has_value());
  CHECK(*err <= 1e-7);

  auto a = two_coords();
  err = check_gradient_fd(*a, {2.0, 1.0}, 1e-4);
  REQUIRE(err.has_value());
  CHECK(*err <= 1e-10);
  // tie point is skipped
  CHECK_FALSE(check_gradient_fd(*a, {1.0, 1.0}, 1e-4).has_value());
  CHECK_THROWS_AS(check_gradient_fd(*a, {1.0, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("finite difference agreement on a generated max-of-quadratics") {
  auto inst = generate_max_quadratic(3, 3, 17);
  Rng rng(5);
  int checked = 0;
  for (int t = 0; t < 200 && checked < 50; ++t) {
    Vec x = inst.setup.sample_point(rng);
    auto err = check_gradient_fd(*inst.objective, x, 1e-5);
    if (!err) continue;  // kink within the stencil
    CHECK(*err <= 1e-6);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("lipschitz constant estimation") {
  auto setup = ProxSetup::box({-1.0, -1.0}, {1.0, 1.0}, {0.0, 0.0});
  auto affine = std::make_shared<PiecewiseMaxAffine>(std::vector<Vec>{{3.0, 4.0}}, Vec{0.0});
  auto est = estimate_lipschitz_constants(*affine, setup, 4000);
  CHECK(est.M_est <= 5.0 + 1e-12);
  CHECK(est.M_est >= 4.5);
  CHECK(affine->lipschitz_const(setup) == doctest::Approx(5.0));

  auto quad = half_norm_sq();
  est = estimate_lipschitz_constants(*quad, setup, 4000);
  CHECK(est.L_est <= 1.0 + 1e-9);
  CHECK(est.L_est >= 0.9);

  auto diag = std::make_shared<MaxOfQuadratics>(
      2, std::vector<MaxOfQuadratics::Piece>{{{1.0, 0.0, 0.0, 2.0}, {0.0, 0.0}, 0.0}});
  est = estimate_lipschitz_constants(*diag, setup, 8000);
  CHECK(est.L_est <= 2.0 + 1e-9);
  CHECK(est.L_est >= 1.8);

  CHECK_THROWS_AS(estimate_lipschitz_constants(*quad, setup, 1), std::invalid_argument);
  auto degenerate = ProxSetup::box({0.5, 0.5}, {0.5, 0.5});
  CHECK_THROWS_AS(estimate_lipschitz_constants(*quad, degenerate, 100), std::domain_error);
}

TEST_CASE("strongly convex augmentation") {
  auto base = two_coords();
  StronglyConvexAugmented aug(base, 2.0, {1.0, 1.0});
  const Vec x{3.0, 0.0};
  CHECK(aug.value(x) == doctest::Approx(base->value(x) + 0.5 * 2.0 * (4.0 + 1.0)));
  Vec g = aug.subgradient(x);
  CHECK(g[0] == doctest::Approx(1.0 + 2.0 * 2.0));
  CHECK(g[1] == doctest::Approx(0.0 + 2.0 * -1.0));
  // strong convexity holds on samples
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    Vec a{rng.normal(), rng.normal()}, b{rng.normal(), rng.normal()};
    const Vec d = sub(b, a);
    CHECK(aug.value(b) >=
          aug.value(a) + dot(aug.subgradient(a), d) + 0.5 * 2.0 * dot(d, d) - 1e-9);
  }
}

TEST_CASE("convexity and subgradient inequality properties (sampled)") {
  auto inst = generate_max_quadratic(4, 3, 99);
  Rng rng(13);
  for (const OraclePtr& o : {inst.objective, inst.constraint}) {
    for (int t = 0; t < 1000; ++t) {
      Vec x = inst.setup.sample_point(rng);
      Vec y = inst.setup.sample_point(rng);
      const double lam = rng.uniform01();
      Vec z(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) z[i] = lam * x[i] + (1.0 - lam) * y[i];
      CHECK(o->value(z) <= lam * o->value(x) + (1.0 - lam) * o->value(y) + 1e-9);
      CHECK(o->value(y) >= o->value(x) + dot(o->subgradient(x), sub(y, x)) - 1e-9);
    }
  }
}

TEST_CASE("v_f is bounded by the norm of x - y (sampled)") {
  auto inst = generate_max_quadratic(3, 2, 41);
  Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    Vec x = inst.setup.sample_point(rng);
    Vec y = inst.setup.sample_point(rng);
    CHECK(v_f(*inst.objective, inst.setup, x, y) <=
          inst.setup.norm(sub(x, y)) + 1e-10);
  }
}

TEST_CASE("piecewise affine lipschitz property (sampled)") {
  auto inst = generate_max_quadratic(3, 4, 7);
  const auto* g = dynamic_cast<const PiecewiseMaxAffine*>(inst.constraint.get());
  REQUIRE(g != nullptr);
  const double Mg = g->lipschitz_const(inst.setup);
  CHECK(Mg == doctest::Approx(inst.Mg));
  Rng rng(21);
  for (int t = 0; t < 1000; ++t) {
    Vec x = inst.setup.sample_point(rng);
    Vec y = inst.setup.sample_point(rng);
    CHECK(std::fabs(g->value(x) - g->value(y)) <=
          Mg * inst.setup.norm(sub(x, y)) + 1e-10);
  }
}
