#include "ncfbm/rough.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ncfbm/errors.hpp"
#include "ncfbm/numerics.hpp"

namespace ncfbm {

namespace {

void check_window(double s, double t) {
  if (!(0.0 <= s && s <= t && t <= 1.0)) {
    std::ostringstream os;
    os << "window [" << s << "," << t << "] must satisfy 0 <= s <= t <= 1";
    throw ParameterError(os.str());
  }
}

void check_level(const MatrixPath& path, int level, const char* what) {
  if (level < 0 || level > path.level) {
    throw GridError(std::string(what) + ": level " + std::to_string(level) +
                    " is not available on a path of level " + std::to_string(path.level));
  }
}

// Node matrix of the path at index i of grid `level`.
const Eigen::MatrixXd& node(const MatrixPath& path, int level, long i) {
  return path.at(i << (path.level - level));
}

// s, the level-N nodes inside (s,t), and t.
std::vector<double> breakpoints(int N, double s, double t) {
  std::vector<double> pts{s};
  const double scale = std::ldexp(1.0, N);
  long first = static_cast<long>(std::floor(s * scale)) + 1;
  for (long i = first; static_cast<double>(i) / scale < t; ++i) pts.push_back(static_cast<double>(i) / scale);
  if (t > s) pts.push_back(t);
  return pts;
}

}  // namespace

long grid_index(double t, int level) {
  const double x = std::ldexp(t, level);
  const double r = std::round(x);
  if (std::fabs(x - r) > 1e-9 || t < 0.0 || t > 1.0) {
    std::ostringstream os;
    os << "time " << t << " is not a point of the level-" << level << " dyadic grid";
    throw GridError(os.str());
  }
  return static_cast<long>(r);
}

Eigen::MatrixXd Grid2Fn::at(double s, double t) const {
  if (!(s <= t)) throw ParameterError("Grid2Fn::at needs s <= t");
  return f_(grid_index(s, level_), grid_index(t, level_));
}

Grid2Fn delta1(const MatrixPath& path) {
  const MatrixPath* p = &path;
  return Grid2Fn(path.level, [p](long i, long j) -> Eigen::MatrixXd { return p->at(j) - p->at(i); });
}

Eigen::MatrixXd delta2(const Grid2Fn& h, double s, double u, double t) {
  if (!(s <= u && u <= t)) throw ParameterError("delta2 needs s <= u <= t");
  const long i = grid_index(s, h.level()), k = grid_index(u, h.level()), j = grid_index(t, h.level());
  return h(i, j) - h(i, k) - h(k, j);
}

std::vector<Eigen::MatrixXd> pl_levy_area(const MatrixPath& path, int N, double s, double t,
                                          const std::vector<Eigen::MatrixXd>& Us) {
  check_level(path, N, "pl_levy_area");
  check_window(s, t);
  const int d = path.dim();
  std::vector<Eigen::MatrixXd> out(Us.size(), Eigen::MatrixXd::Zero(d, d));
  if (t == s) return out;
  const DyadicInterpolant X(path, N);
  const auto pts = breakpoints(N, s, t);
  const Eigen::MatrixXd Xs = X(s);
  Eigen::MatrixXd Xa = Xs;
  for (std::size_t p = 1; p < pts.size(); ++p) {
    const Eigen::MatrixXd Xb = X(pts[p]);
    const Eigen::MatrixXd D = Xb - Xa;
    // (X_a - X_s) + D/2 = midpoint minus X_s
    const Eigen::MatrixXd C = 0.5 * (Xa + Xb) - Xs;
    for (std::size_t u = 0; u < Us.size(); ++u) out[u].noalias() += (C * Us[u]) * D;
    Xa = Xb;
  }
  return out;
}

Eigen::MatrixXd pl_levy_area(const MatrixPath& path, int N, double s, double t,
                             const Eigen::MatrixXd& U) {
  return pl_levy_area(path, N, s, t, std::vector<Eigen::MatrixXd>{U}).front();
}

Eigen::MatrixXd pl_levy_area_right(const MatrixPath& path, int N, double s, double t,
                                   const Eigen::MatrixXd& U) {
  check_level(path, N, "pl_levy_area_right");
  check_window(s, t);
  const int d = path.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  if (t == s) return out;
  const DyadicInterpolant X(path, N);
  const auto pts = breakpoints(N, s, t);
  const Eigen::MatrixXd Xs = X(s);
  Eigen::MatrixXd Xa = Xs;
  for (std::size_t p = 1; p < pts.size(); ++p) {
    const Eigen::MatrixXd Xb = X(pts[p]);
    const Eigen::MatrixXd D = Xb - Xa;
    out.noalias() += D * (U * (0.5 * (Xa + Xb) - Xs));
    Xa = Xb;
  }
  return out;
}

LevyAreaEval::LevyAreaEval(const MatrixPath& path, int N) : path_(&path), N_(N) {
  check_level(path, N, "LevyAreaEval");
}

Eigen::MatrixXd LevyAreaEval::operator()(double s, double t, const Eigen::MatrixXd& U) const {
  return pl_levy_area(*path_, N_, s, t, U);
}

std::vector<Eigen::MatrixXd> LevyAreaEval::operator()(double s, double t,
                                                      const std::vector<Eigen::MatrixXd>& Us) const {
  return pl_levy_area(*path_, N_, s, t, Us);
}

double LevyAreaEval::cauchy(double s, double t, const Eigen::MatrixXd& U) const {
  if (N_ == 0) return std::numeric_limits<double>::quiet_NaN();
  return operator_norm(pl_levy_area(*path_, N_, s, t, U) - pl_levy_area(*path_, N_ - 1, s, t, U));
}

double path_sup_norm(const MatrixPath& path) {
  double m = 0.0;
  for (const auto& A : path.mats) m = std::max(m, operator_norm(A));
  return m;
}

double levy_scale(double sup_norm, const Eigen::MatrixXd& U) {
  return (1.0 + operator_norm(U)) * (1.0 + sup_norm) * (1.0 + sup_norm);
}

double levy_scale(const MatrixPath& path, const Eigen::MatrixXd& U) {
  return levy_scale(path_sup_norm(path), U);
}

double chen_defect(const LevyAreaEval& area, double s, double u, double t, const Eigen::MatrixXd& U) {
  if (!(s <= u && u <= t)) throw ParameterError("chen_defect needs s <= u <= t");
  const DyadicInterpolant X(area.path(), area.level());
  const Eigen::MatrixXd defect =
      area(s, t, U) - area(s, u, U) - area(u, t, U) - (X(u) - X(s)) * U * (X(t) - X(u));
  return operator_norm(defect);
}

double commutator_defect(const MatrixPath& path, int n) {
  check_level(path, n, "commutator_defect");
  const int d = path.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd lhs = pl_levy_area(path, n, 0.0, 1.0, I);
  const Eigen::MatrixXd& X1 = path.mats.back();
  Eigen::MatrixXd rhs = 0.5 * X1 * X1;
  for (long i = 0; i < (1L << n); ++i) rhs += 0.5 * commutator(node(path, n, i), node(path, n, i + 1));
  return operator_norm(lhs - rhs);
}

LevelDiff level_diff(const MatrixPath& path, int n, long k, long l, const Eigen::MatrixXd& U) {
  if (n < 0 || n + 1 > path.level) {
    throw GridError("level_diff needs n+1 <= path level (" + std::to_string(path.level) + ")");
  }
  if (!(0 <= k && k < l && l <= (1L << n))) throw GridError("level_diff window must satisfy 0 <= k < l <= 2^n");
  const double s = std::ldexp(static_cast<double>(k), -n);
  const double t = std::ldexp(static_cast<double>(l), -n);
  LevelDiff out;
  out.by_areas = pl_levy_area(path, n + 1, s, t, U) - pl_levy_area(path, n, s, t, U);
  out.by_increments = Eigen::MatrixXd::Zero(path.dim(), path.dim());
  for (long i = k; i < l; ++i) {
    const Eigen::MatrixXd Ya = node(path, n + 1, 2 * i + 1) - node(path, n + 1, 2 * i);
    const Eigen::MatrixXd Yb = node(path, n + 1, 2 * i + 2) - node(path, n + 1, 2 * i + 1);
    out.by_increments += 0.5 * (Ya * U * Yb - Yb * U * Ya);
  }
  return out;
}

TensorPoly outer(const Poly& P, const Poly& Q) {
  TensorPoly T;
  for (int a = 0; a <= P.degree(); ++a) {
    for (int b = 0; b <= Q.degree(); ++b) {
      const double c = P.coeffs[a] * Q.coeffs[b];
      if (c != 0.0) T.terms.push_back({c, a, b});
    }
  }
  return T.canonical();
}

namespace {

int max_power(const TensorPoly& T) {
  int p = 0;
  for (const auto& t : T.terms) p = std::max({p, t.left, t.right});
  return p;
}

// sum_terms c A^a D A^b with A^k supplied.
Eigen::MatrixXd apply_terms(const TensorPoly& T, const std::vector<Eigen::MatrixXd>& pw,
                            const Eigen::MatrixXd& D) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(D.rows(), D.cols());
  for (const auto& t : T.terms) acc.noalias() += t.coef * (pw[t.left] * D * pw[t.right]);
  return acc;
}

struct CellRange {
  long first, last;  // cell indices at `level`
};

CellRange cells(const MatrixPath& path, int level, double s, double t, const char* what) {
  check_level(path, level, what);
  check_window(s, t);
  return {grid_index(s, level), grid_index(t, level)};
}

}  // namespace

Eigen::MatrixXd riemann_sum(const MatrixPath& path, const TensorPoly& integrand, double s, double t,
                            int level) {
  const auto [first, last] = cells(path, level, s, t, "riemann_sum");
  const int p = max_power(integrand);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(path.dim(), path.dim());
  for (long i = first; i < last; ++i) {
    const auto pw = matrix_powers(node(path, level, i), p);
    acc += apply_terms(integrand, pw, node(path, level, i + 1) - node(path, level, i));
  }
  return acc;
}

Eigen::MatrixXd young_integral(const MatrixPath& path, const Poly& P, const Poly& Q, double s,
                               double t, int level) {
  return riemann_sum(path, outer(P, Q), s, t, level);
}

Eigen::MatrixXd rough_integral(const LevyAreaEval& area, const TensorPoly& integrand, double s,
                               double t, int level) {
  const MatrixPath& path = area.path();
  const auto [first, last] = cells(path, level, s, t, "rough_integral");
  if (area.level() < level) throw ParameterError("rough_integral needs an area level >= the sum level");
  const int p = max_power(integrand);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(path.dim(), path.dim());
  for (long i = first; i < last; ++i) {
    const double a = std::ldexp(static_cast<double>(i), -level);
    const double b = std::ldexp(static_cast<double>(i + 1), -level);
    const auto pw = matrix_powers(node(path, level, i), p);
    acc += apply_terms(integrand, pw, node(path, level, i + 1) - node(path, level, i));
    if (p == 0) continue;
    // A[m] = X2_{ab}[X_a^m], m < p
    const auto A = area(a, b, std::vector<Eigen::MatrixXd>(pw.begin(), pw.begin() + p));
    for (const auto& term : integrand.terms) {
      for (int j = 0; j < term.left; ++j) {
        acc.noalias() += term.coef * (pw[j] * A[term.left - 1 - j] * pw[term.right]);
      }
      for (int j = 0; j < term.right; ++j) {
        acc.noalias() += term.coef * (pw[term.left] * A[j].transpose() * pw[term.right - 1 - j]);
      }
    }
  }
  return acc;
}

Eigen::MatrixXd rough_integral(const LevyAreaEval& area, const Poly& P, const Poly& Q, double s,
                               double t, int level) {
  return rough_integral(area, outer(P, Q), s, t, level);
}

Eigen::MatrixXd strato_free_integral(const MatrixPath& path, const Poly& P, const Poly& Q, double s,
                                     double t, int level) {
  const auto [first, last] = cells(path, level, s, t, "strato_free_integral");
  const int p = std::max({P.degree(), Q.degree(), 0});
  const double dt = std::ldexp(1.0, -level);
  Eigen::MatrixXd acc = young_integral(path, P, Q, s, t, level);
  for (long i = first; i < last; ++i) {
    const auto pw = matrix_powers(node(path, level, i), p);
    const Eigen::MatrixXd PX = eval_poly(P, node(path, level, i));
    const Eigen::MatrixXd QX = eval_poly(Q, node(path, level, i));
    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(path.dim(), path.dim());
    // dP (x) Q: X^j (x) X^{a-1-j} (x) Q -> phi(X^{a-1-j}) X^j Q
    for (int a = 1; a <= P.degree(); ++a) {
      if (P.coeffs[a] == 0.0) continue;
      for (int j = 0; j < a; ++j) corr += P.coeffs[a] * id_phi_id(pw[j], pw[a - 1 - j], QX);
    }
    // P (x) dQ: P (x) X^j (x) X^{b-1-j} -> phi(X^j) P X^{b-1-j}
    for (int b = 1; b <= Q.degree(); ++b) {
      if (Q.coeffs[b] == 0.0) continue;
      for (int j = 0; j < b; ++j) corr += Q.coeffs[b] * id_phi_id(PX, pw[j], pw[b - 1 - j]);
    }
    acc += 0.5 * dt * corr;
  }
  return acc;
}

Eigen::MatrixXd lebesgue_integral(const MatrixPath& path, int n, const TensorPoly& integrand,
                                  double s, double t) {
  check_level(path, n, "lebesgue_integral");
  check_window(s, t);
  int deg = 0;
  for (const auto& term : integrand.terms) deg = std::max(deg, term.left + term.right);
  const GaussRule rule = gauss_legendre01(deg / 2 + 1);
  const int p = max_power(integrand);
  const DyadicInterpolant X(path, n);
  const auto pts = breakpoints(n, s, t);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(path.dim(), path.dim());
  Eigen::MatrixXd Xa = X(s);
  for (std::size_t q = 1; q < pts.size(); ++q) {
    const Eigen::MatrixXd Xb = X(pts[q]);
    const Eigen::MatrixXd D = Xb - Xa;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const auto pw = matrix_powers(Xa + rule.nodes[g] * D, p);
      acc += rule.weights[g] * apply_terms(integrand, pw, D);
    }
    Xa = Xb;
  }
  return acc;
}

double ito_defect(const LevyAreaEval& area, const Poly& R, double s, double t, int level,
                  IntegralMode mode) {
  const MatrixPath& path = area.path();
  const auto [first, last] = cells(path, level, s, t, "ito_defect");
  const TensorPoly dR = tensor_derivative(R);
  const Eigen::MatrixXd lhs = eval_poly(R, node(path, level, last)) - eval_poly(R, node(path, level, first));
  const Eigen::MatrixXd rhs = mode == IntegralMode::Young ? riemann_sum(path, dR, s, t, level)
                                                          : rough_integral(area, dR, s, t, level);
  return operator_norm(lhs - rhs);
}

namespace {

Eigen::MatrixXd dyadic_sum(const Grid2Fn& M, int L, long i0, long j0) {
  // i0, j0 are indices on M's grid; cells of level L have stride 2^{level-L}.
  const long stride = 1L << (M.level() - L);
  Eigen::MatrixXd acc;
  for (long i = i0; i < j0; i += stride) {
    Eigen::MatrixXd v = M(i, i + stride);
    if (acc.size() == 0) {
      acc = std::move(v);
    } else {
      acc += v;
    }
  }
  return acc;
}

}  // namespace

SewingValue sewing_at(const Grid2Fn& M, int L, double s, double t) {
  if (L < 2 || L > M.level()) {
    throw ParameterError("sewing needs 2 <= L <= grid level " + std::to_string(M.level()));
  }
  if (!(s < t)) throw ParameterError("sewing needs s < t");
  grid_index(s, L - 2);
  grid_index(t, L - 2);
  const long i0 = grid_index(s, M.level());
  const long j0 = grid_index(t, M.level());
  const Eigen::MatrixXd I2 = dyadic_sum(M, L - 2, i0, j0);
  const Eigen::MatrixXd I1 = dyadic_sum(M, L - 1, i0, j0);
  const Eigen::MatrixXd I0 = dyadic_sum(M, L, i0, j0);
  SewingValue out;
  out.limit = I0;
  out.value = M(i0, j0) - I0;
  out.cauchy = operator_norm(I0 - I1);
  out.cauchy_prev = operator_norm(I1 - I2);
  const double floor = 1e-12 * (1.0 + operator_norm(I0));
  if (out.cauchy > out.cauchy_prev + floor) {
    std::ostringstream os;
    os << "dyadic refinement is not Cauchy at (" << s << "," << t << "): difference grew from "
       << out.cauchy_prev << " to " << out.cauchy;
    throw RegimeError(os.str());
  }
  return out;
}

Grid2Fn sewing_apply(const Grid2Fn& M, int L) {
  if (L < 2 || L > M.level()) {
    throw ParameterError("sewing needs 2 <= L <= grid level " + std::to_string(M.level()));
  }
  const int level = M.level();
  return Grid2Fn(level, [M, L, level](long i, long j) -> Eigen::MatrixXd {
    const double s = std::ldexp(static_cast<double>(i), -level);
    const double t = std::ldexp(static_cast<double>(j), -level);
    if (i == j) return M(i, j) * 0.0;
    return sewing_at(M, L, s, t).value;
  });
}

double sewing_constant(double mu) {
  if (!(mu > 1.0)) throw ParameterError("sewing constant needs mu > 1");
  return 2.0 + std::pow(2.0, mu) * std::riemann_zeta(mu);
}

double rate_estimate(const RateSeries& series) {
  if (series.points.size() < 4) throw ParameterError("rate_estimate needs at least 4 points");
  std::vector<double> xs, ys;
  for (const auto& [n, e] : series.points) {
    if (!(e > 0.0)) throw ParameterError("rate_estimate needs positive errors");
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log2(e));
  }
  return ls_slope(xs, ys);
}

Eigen::MatrixXd adapted_matrix(const MatrixPath& path, const Word& word, double s_max) {
  const int d = path.dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(d, d);
  for (const Letter& letter : word) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (const auto& term : letter.terms) {
      if (term.time > s_max + 1e-15) {
        std::ostringstream os;
        os << "letter time " << term.time << " lies after " << s_max << "; the element is not adapted";
        throw ParameterError(os.str());
      }
      m += term.coef * path.at(grid_index(term.time, path.level));
    }
    acc = acc * m;
  }
  return acc;
}

}  // namespace ncfbm
