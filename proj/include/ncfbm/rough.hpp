#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ncfbm/matrix_model.hpp"
#include "ncfbm/moments.hpp"
#include "ncfbm/ncalg.hpp"

namespace ncfbm {

/// Grid index of t on the level-`level` dyadic grid; GridError if t is off-grid.
long grid_index(double t, int level);

/// Two-parameter function A_{st} on the grid pairs of a dyadic level,
/// evaluated lazily from indices (i <= j).
class Grid2Fn {
 public:
  using Fn = std::function<Eigen::MatrixXd(long, long)>;

  Grid2Fn(int level, Fn f) : level_(level), f_(std::move(f)) {}

  int level() const { return level_; }
  Eigen::MatrixXd operator()(long i, long j) const { return f_(i, j); }
  Eigen::MatrixXd at(double s, double t) const;

 private:
  int level_;
  Fn f_;
};

/// (delta X)_{st} = X_t - X_s on the path grid.
Grid2Fn delta1(const MatrixPath& path);

/// (delta h)_{sut} = h_{st} - h_{su} - h_{ut}
Eigen::MatrixXd delta2(const Grid2Fn& h, double s, double u, double t);

/// Integral over [s,t] of (X^{(N)}_u - X^{(N)}_s) U dX^{(N)}_u for the
/// piecewise-linear interpolant, exact for any s <= t in [0,1]. Each linear
/// piece [a,b] with increment D contributes (X_a - X_s) U D + D U D / 2.
Eigen::MatrixXd pl_levy_area(const MatrixPath& path, int N, double s, double t,
                             const Eigen::MatrixXd& U);

/// Same integral for several middle factors at once (shared piece walk).
std::vector<Eigen::MatrixXd> pl_levy_area(const MatrixPath& path, int N, double s, double t,
                                          const std::vector<Eigen::MatrixXd>& Us);

/// Integral over [s,t] of dX^{(N)}_u U (X^{(N)}_u - X^{(N)}_s).
Eigen::MatrixXd pl_levy_area_right(const MatrixPath& path, int N, double s, double t,
                                   const Eigen::MatrixXd& U);

/// Approximated area at a fixed level N of one path.
class LevyAreaEval {
 public:
  LevyAreaEval(const MatrixPath& path, int N);

  int level() const { return N_; }
  const MatrixPath& path() const { return *path_; }
  Eigen::MatrixXd operator()(double s, double t, const Eigen::MatrixXd& U) const;
  std::vector<Eigen::MatrixXd> operator()(double s, double t,
                                          const std::vector<Eigen::MatrixXd>& Us) const;
  /// ||X2^{(N)}_{st}[U] - X2^{(N-1)}_{st}[U]||, or NaN when N = 0.
  double cauchy(double s, double t, const Eigen::MatrixXd& U) const;

 private:
  const MatrixPath* path_;
  int N_;
};

/// (1 + ||U||)(1 + max_t ||X_t||)^2, the tolerance scale of the identity checks.
double levy_scale(const MatrixPath& path, const Eigen::MatrixXd& U);
double levy_scale(double sup_norm, const Eigen::MatrixXd& U);
/// max over grid nodes of ||X_t||
double path_sup_norm(const MatrixPath& path);

/// ||X2_{st} - X2_{su} - X2_{ut} - dX^{(N)}_{su} U dX^{(N)}_{ut}||
double chen_defect(const LevyAreaEval& area, double s, double u, double t, const Eigen::MatrixXd& U);

/// ||X2^{(n)}_{01}[1] - X_1^2/2 - sum_i [X_{t_i}, X_{t_{i+1}}]/2||
double commutator_defect(const MatrixPath& path, int n);

struct LevelDiff {
  Eigen::MatrixXd by_areas;       // X2^{(n+1)} - X2^{(n)} over the window
  Eigen::MatrixXd by_increments;  // sum_i (Y_{2i} U Y_{2i+1} - Y_{2i+1} U Y_{2i}) / 2
};

/// Window [k/2^n, l/2^n]; needs n+1 <= path level.
LevelDiff level_diff(const MatrixPath& path, int n, long k, long l, const Eigen::MatrixXd& U);

/// sum_{(a,b)} c_a d_b x^a (x) x^b for P = sum c_a x^a, Q = sum d_b x^b.
TensorPoly outer(const Poly& P, const Poly& Q);

/// Left-point sum over the level-`level` partition of [s,t] of
/// sum_terms c X^a dX X^b. young_integral is this with outer(P,Q).
Eigen::MatrixXd riemann_sum(const MatrixPath& path, const TensorPoly& integrand, double s, double t,
                            int level);
Eigen::MatrixXd young_integral(const MatrixPath& path, const Poly& P, const Poly& Q, double s,
                               double t, int level);

/// Riemann sum plus, on every cell, (d(x^a) # X2) X^b + X^a (X2* # d(x^b)) with
/// (U (x) V) # X2 = U X2[V] and X2* # (U (x) V) = (X2[U^T])^T V.
Eigen::MatrixXd rough_integral(const LevyAreaEval& area, const TensorPoly& integrand, double s,
                               double t, int level);
Eigen::MatrixXd rough_integral(const LevyAreaEval& area, const Poly& P, const Poly& Q, double s,
                               double t, int level);

/// Riemann sum plus 1/2 sum_i dt_i IdPhiId[dP(X) (x) Q(X) + P(X) (x) dQ(X)].
Eigen::MatrixXd strato_free_integral(const MatrixPath& path, const Poly& P, const Poly& Q, double s,
                                     double t, int level);

/// Exact integral of sum_terms c (X^{(n)})^a dX^{(n)} (X^{(n)})^b over [s,t]
/// (Gauss-Legendre per linear piece with enough nodes to be exact).
Eigen::MatrixXd lebesgue_integral(const MatrixPath& path, int n, const TensorPoly& integrand,
                                  double s, double t);

enum class IntegralMode { Young, Rough };

/// ||R(X_t) - R(X_s) - integral of dR(X) # dX|| with the integral taken as a
/// Riemann or corrected sum at `level`.
double ito_defect(const LevyAreaEval& area, const Poly& R, double s, double t, int level,
                  IntegralMode mode);

struct SewingValue {
  Eigen::MatrixXd value;     // M_{st} - I_L with I_L the level-L sum
  Eigen::MatrixXd limit;     // I_L
  double cauchy = 0.0;       // ||I_L - I_{L-1}||
  double cauchy_prev = 0.0;  // ||I_{L-1} - I_{L-2}||
};

/// Sewing correction at (s,t) from dyadic sums of M at levels L, L-1, L-2.
/// RegimeError when the refinement differences grow.
SewingValue sewing_at(const Grid2Fn& M, int L, double s, double t);

/// Lambda(delta M) as a grid function, refined at level L.
Grid2Fn sewing_apply(const Grid2Fn& M, int L);

/// c_mu = 2 + 2^mu zeta(mu), mu > 1.
double sewing_constant(double mu);

struct RateSeries {
  std::vector<std::pair<int, double>> points;
  void add(int n, double err) { points.emplace_back(n, err); }
};

/// Least-squares slope of log2(error) against n (>= 4 points, positive errors).
double rate_estimate(const RateSeries& series);

/// Matrix of a word whose letters use times <= s_max on the path grid.
/// ParameterError when a letter reaches beyond s_max (the element is not adapted).
Eigen::MatrixXd adapted_matrix(const MatrixPath& path, const Word& word, double s_max);

}  // namespace ncfbm
