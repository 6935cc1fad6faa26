#include <doctest.h>

#include <cmath>

#include "md/errors.hpp"
#include "md/instances.hpp"

using namespace md;

namespace {

// Independent eigenvalue oracle: plain power iteration on a PSD matrix.
double power_iteration_max_eig(const std::vector<double>& A, int n, int iters = 20000) {
  Vec v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = 1.0 + 0.01 * i;
  double lam = 0.0;
  for (int t = 0; t < iters; ++t) {
    Vec w(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        w[static_cast<std::size_t>(i)] +=
            A[static_cast<std::size_t>(i) * n + j] * v[static_cast<std::size_t>(j)];
    const double nn = norm2(w);
    if (nn == 0.0) return 0.0;
    for (double& x : w) x /= nn;
    lam = nn;
    v = w;
  }
  return lam;
}

}  // namespace

TEST_CASE("generator determinism: identical files byte for byte") {
  auto a = generate_max_quadratic(2, 1, 7);
  auto b = generate_max_quadratic(2, 1, 7);
  CHECK(instance_to_json(a) == instance_to_json(b));
  auto c = generate_max_quadratic(2, 1, 8);
  CHECK(instance_to_json(a) != instance_to_json(c));
}

TEST_CASE("generated pieces are PSD") {
  auto inst = generate_max_quadratic(2, 3, 1);
  const auto* q = dynamic_cast<const MaxOfQuadratics*>(inst.objective.get());
  REQUIRE(q != nullptr);
  Rng rng(2);
  for (int i = 0; i < q->piece_count(); ++i) {
    const auto& A = q->piece(i).A;
    for (int t = 0; t < 500; ++t) {
      Vec x{rng.normal(), rng.normal()};
      double quad = 0.0;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          quad += x[static_cast<std::size_t>(r)] * A[static_cast<std::size_t>(r) * 2 + c] *
                  x[static_cast<std::size_t>(c)];
      CHECK(quad >= -1e-10);
    }
  }
}

TEST_CASE("generated L equals max eigenvalue of the pieces") {
  auto inst = generate_max_quadratic(5, 4, 3);
  const auto* q = dynamic_cast<const MaxOfQuadratics*>(inst.objective.get());
  REQUIRE(q != nullptr);
  double ref = 0.0;
  for (int i = 0; i < q->piece_count(); ++i)
    ref = std::max(ref, power_iteration_max_eig(q->piece(i).A, 5));
  CHECK(inst.L == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("generated instances have a strictly feasible center and valid Theta0") {
  for (std::uint64_t seed : {1ull, 5ull, 9ull}) {
    auto inst = generate_max_quadratic(3, 2, seed);
    CHECK(inst.constraint->value(inst.setup.center()) <= -0.1 + 1e-12);
    CHECK(inst.theta0_sq == doctest::Approx(1.5));  // n/2 over [-1,1]^3
    CHECK(inst.Mg > 0.0);
  }
}

TEST_CASE("ActiveLinear fixture constants") {
  auto inst = make_known_solution_instance(FixtureKind::ActiveLinear);
  REQUIRE(inst.known_solution.has_value());
  const Vec& xs = *inst.known_solution;
  CHECK(xs[0] == 0.5);
  CHECK(xs[1] == 0.5);
  CHECK(*inst.known_value == 0.25);
  CHECK(inst.objective->value(xs) == doctest::Approx(0.25));
  CHECK(inst.constraint->value(xs) == doctest::Approx(0.0));  // active constraint
  CHECK(inst.Mg == doctest::Approx(std::sqrt(2.0)));
  CHECK(inst.L == 1.0);
  CHECK(*inst.grad_at_solution_norm == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(inst.theta0_sq >= inst.setup.dgf_value(xs) - 1e-15);

  // grid-refinement oracle around x*: no feasible point does better
  double best = 1e9;
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 200; ++j) {
      Vec x{-2.0 + 4.0 * i / 200.0, -2.0 + 4.0 * j / 200.0};
      if (inst.constraint->value(x) <= 1e-12) best = std::min(best, inst.objective->value(x));
    }
  CHECK(best >= 0.25 - 1e-9);
}

TEST_CASE("StronglyConvexBall fixture constants") {
  auto inst = make_known_solution_instance(FixtureKind::StronglyConvexBall);
  const Vec& xs = *inst.known_solution;
  CHECK(xs[0] == 0.5);
  CHECK(xs[1] == 0.5);
  CHECK(inst.mu == 1.0);
  CHECK(inst.Mg == doctest::Approx(3.0 * std::sqrt(2.0)));
  // g(x*) = 1/2 ||(0.5,0.5)-(1,1)||^2 - 1/4 = 0: boundary of the ball
  CHECK(inst.constraint->value(xs) == doctest::Approx(0.0));
  CHECK(inst.objective->value(xs) == doctest::Approx(0.25));

  double best = 1e9;
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j <= 400; ++j) {
      Vec x{-2.0 + 4.0 * i / 400.0, -2.0 + 4.0 * j / 400.0};
      if (inst.constraint->value(x) <= 1e-9) best = std::min(best, inst.objective->value(x));
    }
  CHECK(best >= 0.25 - 1e-3);  // grid resolution slack
  CHECK(best <= 0.26);
}

TEST_CASE("save/load round trip is field-for-field exact") {
  auto inst = generate_max_quadratic(3, 2, 5);
  const std::string text = instance_to_json(inst);
  auto loaded = instance_from_json(text);
  CHECK(instance_to_json(loaded) == text);

  auto ftext = instance_to_json(make_known_solution_instance(FixtureKind::ActiveLinear));
  CHECK(instance_to_json(instance_from_json(ftext)) == ftext);
}

TEST_CASE("non-PSD piece is rejected with the piece named") {
  auto inst = make_known_solution_instance(FixtureKind::ActiveLinear);
  // objective piece 0 becomes diag(1, -0.5)
  auto q = std::make_shared<MaxOfQuadratics>(
      2, std::vector<MaxOfQuadratics::Piece>{{{1.0, 0.0, 0.0, -0.5}, {0.0, 0.0}, 0.0}});
  inst.objective = q;
  inst.known_solution.reset();
  inst.known_value.reset();
  inst.grad_at_solution_norm.reset();
  const std::string bad = instance_to_json(inst);
  CHECK_THROWS_WITH_AS(instance_from_json(bad),
                       doctest::Contains("piece 0"), ValidationError);
}

TEST_CASE("truncated file raises a parse error") {
  auto text = instance_to_json(make_known_solution_instance(FixtureKind::ActiveLinear));
  CHECK_THROWS_AS(instance_from_json(text.substr(0, text.size() / 2)), ParseError);
  CHECK_THROWS_AS(instance_from_json("not json at all"), ParseError);
}

TEST_CASE("dimension mismatch raises a validation error") {
  auto inst = make_known_solution_instance(FixtureKind::ActiveLinear);
  std::string text = instance_to_json(inst);
  // drop one entry from the constraint row
  auto pos = text.find("\"C\"");
  REQUIRE(pos != std::string::npos);
  auto comma = text.find(',', pos);
  auto close = text.find(']', pos);
  REQUIRE(comma < close);
  text.erase(comma, close - comma);
  CHECK_THROWS_AS(instance_from_json(text), ValidationError);
}

TEST_CASE("infeasible stored solution is rejected") {
  auto inst = make_known_solution_instance(FixtureKind::ActiveLinear);
  inst.known_solution = Vec{0.0, 0.0};  // g = 1 > 0
  CHECK_THROWS_AS(instance_from_json(instance_to_json(inst)), ValidationError);
}
