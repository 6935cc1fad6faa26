#include "md/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace md {

namespace {

Vec matvec(const std::vector<double>& A, const Vec& x) {
  const std::size_t n = x.size();
  Vec y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = A.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

// First index attaining the exact maximum; ties resolve to the lowest index.
template <typename ValueFn>
int argmax_piece(int count, ValueFn&& val) {
  int best = 0;
  double bv = val(0);
  for (int i = 1; i < count; ++i) {
    const double v = val(i);
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  return best;
}

template <typename ValueFn>
double top_two_gap(int count, ValueFn&& val) {
  if (count < 2) return std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  double second = best;
  for (int i = 0; i < count; ++i) {
    const double v = val(i);
    if (v > best) {
      second = best;
      best = v;
    } else if (v > second) {
      second = v;
    }
  }
  return best - second;
}

}  // namespace

MaxOfQuadratics::MaxOfQuadratics(int n, std::vector<Piece> pieces)
    : n_(n), pieces_(std::move(pieces)) {
  if (n < 1 || pieces_.empty()) throw std::invalid_argument("MaxOfQuadratics: empty");
  const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  for (const Piece& p : pieces_) {
    if (p.A.size() != nn || p.b.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("MaxOfQuadratics: piece dimension mismatch");
  }
}

double MaxOfQuadratics::piece_value(int i, const Vec& x) const {
  const Piece& p = pieces_[static_cast<std::size_t>(i)];
  return 0.5 * dot(matvec(p.A, x), x) - dot(p.b, x) + p.alpha;
}

Vec MaxOfQuadratics::piece_gradient(int i, const Vec& x) const {
  const Piece& p = pieces_[static_cast<std::size_t>(i)];
  Vec g = matvec(p.A, x);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] -= p.b[j];
  return g;
}

double MaxOfQuadratics::value(const Vec& x) const {
  require_finite(x, "MaxOfQuadratics::value");
  double m = piece_value(0, x);
  for (int i = 1; i < piece_count(); ++i) m = std::max(m, piece_value(i, x));
  return m;
}

int MaxOfQuadratics::active_index(const Vec& x) const {
  return argmax_piece(piece_count(), [&](int i) { return piece_value(i, x); });
}

double MaxOfQuadratics::tie_gap(const Vec& x) const {
  return top_two_gap(piece_count(), [&](int i) { return piece_value(i, x); });
}

Vec MaxOfQuadratics::subgradient(const Vec& x) const {
  require_finite(x, "MaxOfQuadratics::subgradient");
  return piece_gradient(active_index(x), x);
}

PiecewiseMaxAffine::PiecewiseMaxAffine(std::vector<Vec> rows, Vec offsets)
    : rows_(std::move(rows)), offsets_(std::move(offsets)) {
  if (rows_.empty() || rows_.size() != offsets_.size())
    throw std::invalid_argument("PiecewiseMaxAffine: empty or mismatched pieces");
  for (const Vec& r : rows_)
    if (r.size() != rows_.front().size())
      throw std::invalid_argument("PiecewiseMaxAffine: row dimension mismatch");
}

double PiecewiseMaxAffine::value(const Vec& x) const {
  require_finite(x, "PiecewiseMaxAffine::value");
  double m = dot(rows_[0], x) + offsets_[0];
  for (std::size_t j = 1; j < rows_.size(); ++j)
    m = std::max(m, dot(rows_[j], x) + offsets_[j]);
  return m;
}

int PiecewiseMaxAffine::active_index(const Vec& x) const {
  return argmax_piece(piece_count(),
                      [&](int j) { return dot(rows_[static_cast<std::size_t>(j)], x) + offsets_[static_cast<std::size_t>(j)]; });
}

double PiecewiseMaxAffine::tie_gap(const Vec& x) const {
  return top_two_gap(piece_count(),
                     [&](int j) { return dot(rows_[static_cast<std::size_t>(j)], x) + offsets_[static_cast<std::size_t>(j)]; });
}

Vec PiecewiseMaxAffine::subgradient(const Vec& x) const {
  require_finite(x, "PiecewiseMaxAffine::subgradient");
  return rows_[static_cast<std::size_t>(active_index(x))];
}

double PiecewiseMaxAffine::lipschitz_const(const ProxSetup& setup) const {
  double m = 0.0;
  for (const Vec& r : rows_) m = std::max(m, setup.dual_norm(r));
  return m;
}

StronglyConvexAugmented::StronglyConvexAugmented(OraclePtr base, double mu, Vec center)
    : base_(std::move(base)), mu_(mu), center_(std::move(center)) {
  if (!base_) throw std::invalid_argument("StronglyConvexAugmented: null base");
  if (mu_ < 0.0) throw std::invalid_argument("StronglyConvexAugmented: mu < 0");
  if (static_cast<int>(center_.size()) != base_->dim())
    throw std::invalid_argument("StronglyConvexAugmented: center dimension mismatch");
}

double StronglyConvexAugmented::value(const Vec& x) const {
  const Vec d = sub(x, center_);
  return base_->value(x) + 0.5 * mu_ * dot(d, d);
}

Vec StronglyConvexAugmented::subgradient(const Vec& x) const {
  Vec g = base_->subgradient(x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += mu_ * (x[i] - center_[i]);
  return g;
}

double v_f(const ConvexOracle& oracle, const ProxSetup& setup, const Vec& x, const Vec& y) {
  require_finite(x, "v_f x");
  require_finite(y, "v_f y");
  const Vec g = oracle.subgradient(x);
  const double n = setup.dual_norm(g);
  if (n == 0.0) return 0.0;
  return dot(g, sub(x, y)) / n;
}

std::optional<double> check_gradient_fd(const ConvexOracle& oracle, const Vec& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("check_gradient_fd: h must be positive");
  require_finite(x, "check_gradient_fd");
  if (oracle.tie_gap(x) < 1e-12) return std::nullopt;
  const int active = oracle.active_index(x);
  const Vec g = oracle.subgradient(x);
  Vec xp = x, xm = x;
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    if (oracle.active_index(xp) != active || oracle.active_index(xm) != active)
      return std::nullopt;  // kink inside the stencil
    const double fd = (oracle.value(xp) - oracle.value(xm)) / (2.0 * h);
    err = std::max(err, std::fabs(fd - g[i]));
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return err;
}

LipschitzEstimate estimate_lipschitz_constants(const ConvexOracle& oracle,
                                               const ProxSetup& setup, int samples,
                                               std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("estimate_lipschitz_constants: samples < 2");
  Rng rng(seed);
  LipschitzEstimate est;
  bool any = false;
  for (int s = 0; s < samples; ++s) {
    const Vec x = setup.sample_point(rng);
    const Vec y = setup.sample_point(rng);
    const double d = setup.norm(sub(x, y));
    if (d == 0.0) continue;
    any = true;
    est.M_est = std::max(est.M_est, std::fabs(oracle.value(x) - oracle.value(y)) / d);
    est.L_est = std::max(
        est.L_est, setup.dual_norm(sub(oracle.subgradient(x), oracle.subgradient(y))) / d);
  }
  if (!any) throw std::domain_error("estimate_lipschitz_constants: degenerate feasible set");
  return est;
}

}  // namespace md
