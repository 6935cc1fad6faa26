#include "md/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "md/errors.hpp"
#include "md/rng.hpp"

#include <json.hpp>

namespace md {

namespace {

using Json = nlohmann::ordered_json;

Json reals(const Vec& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(format_real(x));
  return a;
}

Vec parse_reals(const Json& a, const std::string& where) {
  if (!a.is_array()) throw ParseError(where + ": expected an array of real strings");
  Vec v;
  v.reserve(a.size());
  for (const auto& e : a) {
    if (!e.is_string()) throw ParseError(where + ": reals must be decimal strings");
    try {
      v.push_back(parse_real(e.get<std::string>()));
    } catch (const std::exception& ex) {
      throw ParseError(where + ": " + ex.what());
    }
  }
  return v;
}

double parse_one_real(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a real string");
  try {
    return parse_real(j.get<std::string>());
  } catch (const std::exception& ex) {
    throw ParseError(where + ": " + ex.what());
  }
}

void validate_psd(const std::vector<double>& A, int n, const std::string& name) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(A[static_cast<std::size_t>(i) * n + j] -
                    A[static_cast<std::size_t>(j) * n + i]) > 1e-9)
        throw ValidationError(name + ": matrix is not symmetric");
  const Vec eig = symmetric_eigenvalues(A, n);
  if (eig.front() < -1e-8)
    throw ValidationError(name + ": matrix is not PSD (eigenvalue " +
                          format_real(eig.front()) + ")");
}

Json oracle_to_json(const ConvexOracle& oracle) {
  Json j;
  if (const auto* q = dynamic_cast<const MaxOfQuadratics*>(&oracle)) {
    j["type"] = "max_quadratic";
    Json A = Json::array(), b = Json::array(), alpha = Json::array();
    for (int i = 0; i < q->piece_count(); ++i) {
      const auto& p = q->piece(i);
      A.push_back(reals(p.A));
      b.push_back(reals(p.b));
      alpha.push_back(format_real(p.alpha));
    }
    j["A"] = std::move(A);
    j["b"] = std::move(b);
    j["alpha"] = std::move(alpha);
    return j;
  }
  if (const auto* a = dynamic_cast<const PiecewiseMaxAffine*>(&oracle)) {
    j["type"] = "max_affine";
    Json C = Json::array(), d = Json::array();
    for (int k = 0; k < a->piece_count(); ++k) {
      C.push_back(reals(a->row(k)));
      d.push_back(format_real(a->offset(k)));
    }
    j["C"] = std::move(C);
    j["d"] = std::move(d);
    return j;
  }
  throw ValidationError("save_instance: oracle type is not serializable");
}

OraclePtr oracle_from_json(const Json& j, int n, const std::string& slot) {
  if (!j.contains("type")) throw ParseError(slot + ": missing 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "max_quadratic") {
    if (!j.contains("A") || !j.contains("b") || !j.contains("alpha"))
      throw ParseError(slot + ": max_quadratic needs A, b, alpha");
    const Json& A = j.at("A");
    const Json& b = j.at("b");
    const Json& alpha = j.at("alpha");
    if (A.size() != b.size() || A.size() != alpha.size() || A.empty())
      throw ValidationError(slot + ": piece count mismatch");
    std::vector<MaxOfQuadratics::Piece> pieces;
    for (std::size_t i = 0; i < A.size(); ++i) {
      MaxOfQuadratics::Piece p;
      p.A = parse_reals(A[i], slot + ".A[" + std::to_string(i) + "]");
      p.b = parse_reals(b[i], slot + ".b[" + std::to_string(i) + "]");
      p.alpha = parse_one_real(alpha[i], slot + ".alpha[" + std::to_string(i) + "]");
      if (p.A.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n) ||
          p.b.size() != static_cast<std::size_t>(n))
        throw ValidationError(slot + ": piece " + std::to_string(i) +
                              " dimension mismatch with the feasible set");
      validate_psd(p.A, n, slot + ": piece " + std::to_string(i));
      pieces.push_back(std::move(p));
    }
    return std::make_shared<MaxOfQuadratics>(n, std::move(pieces));
  }
  if (type == "max_affine") {
    if (!j.contains("C") || !j.contains("d"))
      throw ParseError(slot + ": max_affine needs C, d");
    const Json& C = j.at("C");
    const Json& d = j.at("d");
    if (C.size() != d.size() || C.empty())
      throw ValidationError(slot + ": piece count mismatch");
    std::vector<Vec> rows;
    Vec offsets;
    for (std::size_t k = 0; k < C.size(); ++k) {
      Vec r = parse_reals(C[k], slot + ".C[" + std::to_string(k) + "]");
      if (r.size() != static_cast<std::size_t>(n))
        throw ValidationError(slot + ": row " + std::to_string(k) + " dimension mismatch");
      rows.push_back(std::move(r));
      offsets.push_back(parse_one_real(d[k], slot + ".d[" + std::to_string(k) + "]"));
    }
    return std::make_shared<PiecewiseMaxAffine>(std::move(rows), std::move(offsets));
  }
  throw ParseError(slot + ": unknown oracle type '" + type + "'");
}

Json setup_to_json(const ProxSetup& s) {
  Json j;
  switch (s.kind()) {
    case SetupKind::EuclideanBox:
      j["kind"] = "euclidean_box";
      j["params"] = {{"lo", reals(s.box_lo())},
                     {"hi", reals(s.box_hi())},
                     {"center", reals(s.center())}};
      return j;
    case SetupKind::EuclideanBall:
      j["kind"] = "euclidean_ball";
      j["params"] = {{"ball_center", reals(s.ball_center())},
                     {"radius", format_real(s.ball_radius())},
                     {"center", reals(s.center())}};
      return j;
    case SetupKind::EntropySimplex:
      j["kind"] = "entropy_simplex";
      j["params"] = {{"n", s.dim()}};
      return j;
  }
  throw std::logic_error("unreachable");
}

ProxSetup setup_from_json(const Json& j) {
  if (!j.contains("kind") || !j.contains("params"))
    throw ParseError("setup: missing 'kind' or 'params'");
  const std::string kind = j.at("kind").get<std::string>();
  const Json& p = j.at("params");
  if (kind == "euclidean_box")
    return ProxSetup::box(parse_reals(p.at("lo"), "setup.lo"),
                          parse_reals(p.at("hi"), "setup.hi"),
                          parse_reals(p.at("center"), "setup.center"));
  if (kind == "euclidean_ball")
    return ProxSetup::ball(parse_reals(p.at("ball_center"), "setup.ball_center"),
                           parse_one_real(p.at("radius"), "setup.radius"),
                           parse_reals(p.at("center"), "setup.center"));
  if (kind == "entropy_simplex") return ProxSetup::simplex(p.at("n").get<int>());
  throw ParseError("setup: unknown kind '" + kind + "'");
}

}  // namespace

Vec symmetric_eigenvalues(const std::vector<double>& M, int n) {
  std::vector<double> A = M;
  auto at = [&](int i, int j) -> double& { return A[static_cast<std::size_t>(i) * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vec eig(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

ProblemInstance generate_max_quadratic(int dim, int pieces, std::uint64_t seed) {
  if (dim < 1 || pieces < 1)
    throw std::invalid_argument("generate_max_quadratic: dim and pieces must be >= 1");
  Rng rng(seed);
  const std::size_t n = static_cast<std::size_t>(dim);

  std::vector<MaxOfQuadratics::Piece> qp;
  double L = 0.0;
  for (int i = 0; i < pieces; ++i) {
    std::vector<double> G(n * n);
    for (double& v : G) v = rng.normal();
    MaxOfQuadratics::Piece p;
    p.A.assign(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += G[k * n + r] * G[k * n + c];
        p.A[r * n + c] = s;
      }
    p.b.resize(n);
    for (double& v : p.b) v = rng.normal();
    p.alpha = rng.normal();
    L = std::max(L, symmetric_eigenvalues(p.A, dim).back());
    qp.push_back(std::move(p));
  }

  std::vector<Vec> rows(static_cast<std::size_t>(pieces));
  Vec offsets(static_cast<std::size_t>(pieces));
  for (int j = 0; j < pieces; ++j) {
    rows[static_cast<std::size_t>(j)].resize(n);
    for (double& v : rows[static_cast<std::size_t>(j)]) v = rng.normal();
    offsets[static_cast<std::size_t>(j)] = rng.normal();
  }

  ProblemInstance inst;
  inst.setup = ProxSetup::box(Vec(n, -1.0), Vec(n, 1.0), Vec(n, 0.0));
  inst.objective = std::make_shared<MaxOfQuadratics>(dim, std::move(qp));

  // Slater shift: force g(center) <= -0.1 so productive steps exist.
  {
    PiecewiseMaxAffine probe(rows, offsets);
    const double gc = probe.value(inst.setup.center());
    if (gc > -0.1)
      for (double& d : offsets) d -= gc + 0.1;
  }
  auto constraint = std::make_shared<PiecewiseMaxAffine>(std::move(rows), std::move(offsets));
  inst.Mg = constraint->lipschitz_const(inst.setup);
  inst.constraint = std::move(constraint);
  inst.L = L;
  inst.mu = 0.0;
  inst.theta0_sq = inst.setup.dgf_max();
  return inst;
}

ProblemInstance make_known_solution_instance(FixtureKind kind) {
  const double r2 = std::sqrt(2.0);
  ProblemInstance inst;
  inst.setup = ProxSetup::box({-2.0, -2.0}, {2.0, 2.0}, {0.0, 0.0});
  // f(x) = 1/2 ||x||^2 in both fixtures
  inst.objective = std::make_shared<MaxOfQuadratics>(
      2, std::vector<MaxOfQuadratics::Piece>{{{1.0, 0.0, 0.0, 1.0}, {0.0, 0.0}, 0.0}});
  inst.L = 1.0;
  inst.known_solution = Vec{0.5, 0.5};
  inst.known_value = 0.25;
  inst.grad_at_solution_norm = r2 / 2.0;
  inst.theta0_sq = 0.25;  // d(x*) with d centered at 0

  switch (kind) {
    case FixtureKind::ActiveLinear:
      // g(x) = 1 - x1 - x2, active at x* = (1/2, 1/2)
      inst.constraint = std::make_shared<PiecewiseMaxAffine>(
          std::vector<Vec>{{-1.0, -1.0}}, Vec{1.0});
      inst.Mg = r2;
      inst.mu = 0.0;
      return inst;
    case FixtureKind::StronglyConvexBall:
      // g(x) = 1/2 ||x - (1,1)||^2 - 1/4; x* is the radial projection of 0
      inst.constraint = std::make_shared<MaxOfQuadratics>(
          2, std::vector<MaxOfQuadratics::Piece>{{{1.0, 0.0, 0.0, 1.0}, {1.0, 1.0}, 0.75}});
      inst.Mg = 3.0 * r2;  // max ||x - (1,1)|| over the box
      inst.mu = 1.0;
      return inst;
  }
  throw std::invalid_argument("make_known_solution_instance: unknown kind");
}

std::string instance_to_json(const ProblemInstance& inst) {
  Json j;
  j["version"] = 1;
  j["setup"] = setup_to_json(inst.setup);
  j["objective"] = oracle_to_json(*inst.objective);
  j["constraint"] = oracle_to_json(*inst.constraint);
  j["constants"] = {{"Mg", format_real(inst.Mg)},
                    {"L", format_real(inst.L)},
                    {"mu", format_real(inst.mu)},
                    {"theta0_sq", format_real(inst.theta0_sq)}};
  if (inst.known_solution) {
    Json sol;
    sol["x"] = reals(*inst.known_solution);
    if (inst.known_value) sol["f"] = format_real(*inst.known_value);
    if (inst.grad_at_solution_norm)
      sol["grad_norm"] = format_real(*inst.grad_at_solution_norm);
    j["solution"] = std::move(sol);
  }
  return j.dump(2) + "\n";
}

ProblemInstance instance_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("instance: ") + ex.what());
  }
  try {
    if (!j.contains("version") || j.at("version").get<int>() != 1)
      throw ParseError("instance: missing or unsupported version");
    ProblemInstance inst;
    inst.setup = setup_from_json(j.at("setup"));
    const int n = inst.setup.dim();
    inst.objective = oracle_from_json(j.at("objective"), n, "objective");
    inst.constraint = oracle_from_json(j.at("constraint"), n, "constraint");
    const Json& c = j.at("constants");
    inst.Mg = parse_one_real(c.at("Mg"), "constants.Mg");
    inst.L = parse_one_real(c.at("L"), "constants.L");
    inst.mu = parse_one_real(c.at("mu"), "constants.mu");
    inst.theta0_sq = parse_one_real(c.at("theta0_sq"), "constants.theta0_sq");
    if (j.contains("solution")) {
      const Json& s = j.at("solution");
      Vec x = parse_reals(s.at("x"), "solution.x");
      if (x.size() != static_cast<std::size_t>(n))
        throw ValidationError("solution.x: dimension mismatch");
      if (inst.constraint->value(x) > 1e-9)
        throw ValidationError("solution.x: infeasible (g(x*) > 1e-9)");
      inst.known_solution = std::move(x);
      if (s.contains("f")) inst.known_value = parse_one_real(s.at("f"), "solution.f");
      if (s.contains("grad_norm"))
        inst.grad_at_solution_norm = parse_one_real(s.at("grad_norm"), "solution.grad_norm");
    }
    return inst;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("instance: ") + ex.what());
  }
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_instance: cannot open '" + path + "'");
  out << instance_to_json(inst);
  if (!out) throw std::runtime_error("save_instance: write failed for '" + path + "'");
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_instance: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace md
