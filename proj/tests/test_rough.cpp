#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ncfbm/errors.hpp"
#include "ncfbm/matrix_model.hpp"
#include "ncfbm/rough.hpp"

using namespace ncfbm;

namespace {

MatrixPath scalar_path(double H, int level, std::uint64_t seed) {
  MatrixPath p;
  p.level = level;
  for (long i = 0; i <= (1L << level); ++i) p.times.push_back(std::ldexp(double(i), -level));
  const auto x = sample_fbm_path(H, p.times, seed, 1).front();
  for (double v : x) p.mats.push_back(Eigen::MatrixXd::Constant(1, 1, v));
  return p;
}

MatrixPath matrix_path(int d, int level, double H, std::uint64_t seed) {
  return sample_matrix_path(MatrixEnsembleConfig{d, level, H, seed, 1});
}

double sc(const Eigen::MatrixXd& m) { return m(0, 0); }

Eigen::MatrixXd rand_sym(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = n01(rng);
  return A;
}

double maxabs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Rough, Deltas) {
  const auto path = matrix_path(5, 4, 0.3, 1);
  const auto dX = delta1(path);
  for (double u : {0.25, 0.5, 0.8125}) EXPECT_TRUE(delta2(dX, 0.125, u, 0.875).isZero(0.0) || maxabs(delta2(dX, 0.125, u, 0.875)) < 1e-15);
  MatrixPath flat = path;
  for (auto& m : flat.mats) m = Eigen::MatrixXd::Constant(5, 5, 2.0);
  EXPECT_TRUE(delta1(flat).at(0.25, 0.75).isZero(0.0));
  EXPECT_THROW(delta2(dX, 0.5, 0.25, 0.75), ParameterError);
  EXPECT_THROW(dX.at(0.3, 0.5), GridError);
  EXPECT_THROW(grid_index(0.3, 4), GridError);
  EXPECT_EQ(grid_index(0.375, 3), 3);
}

TEST(Rough, ScalarLevyArea) {
  const auto path = scalar_path(0.3, 6, 2);
  const Eigen::MatrixXd U = Eigen::MatrixXd::Constant(1, 1, 1.7);
  for (int N : {0, 2, 6}) {
    const DyadicInterpolant X(path, N);
    for (auto [s, t] : {std::pair{0.0, 1.0}, {0.25, 0.5}, {0.1, 0.77}}) {
      const double d = sc(X(t) - X(s));
      EXPECT_NEAR(sc(pl_levy_area(path, N, s, t, U)), 0.5 * 1.7 * d * d, 1e-13) << N << " " << s << " " << t;
    }
    EXPECT_TRUE(pl_levy_area(path, N, 0.25, 0.75, Eigen::MatrixXd::Zero(1, 1)).isZero(0.0));
  }
  const LevyAreaEval area(path, 6);
  const double a = sc(path.at(16) - path.at(0)), b = sc(path.at(40) - path.at(16));
  EXPECT_NEAR(0.5 * (a + b) * (a + b) - 0.5 * a * a - 0.5 * b * b - a * b, 0.0, 1e-15);
  EXPECT_LE(chen_defect(area, 0.0, 0.25, 0.625, U), 1e-14);
  const auto diff = level_diff(path, 3, 0, 8, Eigen::MatrixXd::Ones(1, 1));
  EXPECT_NEAR(sc(diff.by_increments), 0.0, 1e-15);
  EXPECT_NEAR(sc(diff.by_areas), 0.0, 1e-13);
}

TEST(Rough, AlgebraicIdentities) {
  const auto path = matrix_path(64, 6, 0.3, 3);
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd U = rand_sym(rng, 64) / 8.0, V = rand_sym(rng, 64) / 8.0;
  const double scale = levy_scale(path, U);
  const LevyAreaEval area(path, 5);
  std::uniform_int_distribution<long> node(0, 64);
  for (int k = 0; k < 10; ++k) {
    long a = node(rng), b = node(rng), c = node(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    EXPECT_LE(chen_defect(area, a / 64.0, b / 64.0, c / 64.0, U), 1e-10 * scale);
  }
  EXPECT_EQ(chen_defect(area, 0.25, 0.25, 0.75, U), 0.0);
  EXPECT_EQ(chen_defect(area, 0.25, 0.75, 0.75, U), 0.0);
  for (int n = 0; n <= 6; ++n) EXPECT_LE(commutator_defect(path, n), 1e-12 * levy_scale(path, Eigen::MatrixXd::Identity(64, 64)));
  for (int n : {0, 2, 5}) {
    const auto diff = level_diff(path, n, 0, 1L << n, U);
    EXPECT_LE(maxabs(diff.by_areas - diff.by_increments), 1e-12 * scale);
    const auto part = level_diff(path, n, (1L << n) / 4, (1L << n) / 2 + 1, U);
    EXPECT_LE(maxabs(part.by_areas - part.by_increments), 1e-12 * scale);
  }
  const Eigen::MatrixXd lin = area(0.125, 0.75, 2.0 * U - 0.5 * V);
  EXPECT_LE(maxabs(lin - 2.0 * area(0.125, 0.75, U) + 0.5 * area(0.125, 0.75, V)), 1e-12 * scale);
  Eigen::MatrixXd W = rand_sym(rng, 64);
  W(0, 1) += 1.0;
  const Eigen::MatrixXd left = pl_levy_area(path, 4, 0.1, 0.9, W);
  const Eigen::MatrixXd right = pl_levy_area_right(path, 4, 0.1, 0.9, W.transpose());
  EXPECT_LE(maxabs(left.transpose() - right), 1e-12 * levy_scale(path, W));
  const auto many = area(0.0, 0.5, std::vector<Eigen::MatrixXd>{U, V});
  EXPECT_LE(maxabs(many[1] - area(0.0, 0.5, V)), 1e-13 * scale);
  EXPECT_THROW(level_diff(path, 6, 0, 64, U), GridError);
  EXPECT_THROW(level_diff(path, 3, 4, 4, U), GridError);
}

TEST(Rough, Integrals) {
  const auto path = matrix_path(8, 6, 0.6, 4);
  const Poly one({1.0});
  const LevyAreaEval area(path, 6);
  const Eigen::MatrixXd dX = path.at(48) - path.at(16);
  for (int level : {2, 4, 6}) {
    EXPECT_LE(maxabs(young_integral(path, one, one, 0.25, 0.75, level) - dX), 1e-14);
    EXPECT_LE(maxabs(rough_integral(area, one, one, 0.25, 0.75, level) - dX), 1e-14);
    EXPECT_LE(maxabs(strato_free_integral(path, one, one, 0.25, 0.75, level) - dX), 1e-14);
  }
  EXPECT_THROW(young_integral(path, one, one, 0.3, 0.75, 4), GridError);
  EXPECT_THROW(young_integral(path, one, one, 0.25, 0.75, 7), GridError);
  const TensorPoly T = outer(Poly({1, 2}), Poly({0, 0, 1}));
  EXPECT_EQ(T, (TensorPoly{{{1.0, 0, 2}, {2.0, 1, 2}}}));
}

TEST(Rough, ScalarIntegralOracles) {
  const auto path = scalar_path(0.5, 12, 5);
  const Poly x = Poly::monomial(1), one({1.0});
  const double X0 = sc(path.at(1024)), X1 = sc(path.at(3072));
  // left-point sum: X_s dX + (dX)^2/2 - sum (dX_i)^2 / 2
  for (int level : {4, 8, 12}) {
    const long stride = 1L << (12 - level);
    double qv = 0.0;
    for (long i = 1024; i < 3072; i += stride) {
      const double d = sc(path.at(i + stride) - path.at(i));
      qv += d * d;
    }
    const double young = sc(young_integral(path, x, one, 0.25, 0.75, level));
    EXPECT_NEAR(young - X0 * (X1 - X0), 0.5 * (X1 - X0) * (X1 - X0) - 0.5 * qv, 1e-12);
    // Stratonovich correction is 1/2 sum dt (P'Q + PQ') on the scalar path
    const Poly P({0.5, -1, 1}), Q({2, 1});
    double corr = 0.0;
    for (long i = 1024; i < 3072; i += stride) {
      const double v = sc(path.at(i));
      corr += 0.5 * std::ldexp(1.0, -level) * ((-1 + 2 * v) * (2 + v) + (0.5 - v + v * v) * 1.0);
    }
    EXPECT_NEAR(sc(strato_free_integral(path, P, Q, 0.25, 0.75, level) - young_integral(path, P, Q, 0.25, 0.75, level)), corr, 1e-12);
    EXPECT_NEAR(sc(lebesgue_integral(path, level, outer(x, one), 0.25, 0.75)), 0.5 * (X1 * X1 - X0 * X0), 1e-12);
  }
  // H = 1/2: Stratonovich sums approach 1/2 (X_t^2 - X_s^2)
  const double strato = sc(strato_free_integral(path, x, one, 0.25, 0.75, 12));
  EXPECT_NEAR(strato, 0.5 * (X1 * X1 - X0 * X0), 0.05);
}

TEST(Rough, StratoFreeApproachesLebesgue) {
  const auto path = matrix_path(24, 12, 0.5, 6);
  const Poly x = Poly::monomial(1), one({1.0});
  const Eigen::MatrixXd ref = lebesgue_integral(path, 12, outer(x, one), 0.0, 1.0);
  const double e4 = operator_norm(strato_free_integral(path, x, one, 0.0, 1.0, 4) - ref);
  const double e10 = operator_norm(strato_free_integral(path, x, one, 0.0, 1.0, 10) - ref);
  EXPECT_LT(e10, e4);
}

TEST(Rough, ItoDefects) {
  {
    const auto path = matrix_path(16, 10, 0.75, 7);
    const LevyAreaEval area(path, 10);
    const Poly R = Poly::monomial(2);
    RateSeries rs;
    for (int n = 4; n <= 10; ++n) rs.add(n, ito_defect(area, R, 0.0, 1.0, n, IntegralMode::Young));
    EXPECT_LT(rate_estimate(rs), -0.3);
  }
  {
    const auto path = matrix_path(16, 10, 0.35, 8);
    const LevyAreaEval area(path, 10);
    const Poly R = Poly::monomial(3);
    const double r4 = ito_defect(area, R, 0.0, 1.0, 4, IntegralMode::Rough);
    const double r10 = ito_defect(area, R, 0.0, 1.0, 10, IntegralMode::Rough);
    EXPECT_LT(r10, 0.5 * r4);
    EXPECT_GT(ito_defect(area, R, 0.0, 1.0, 10, IntegralMode::Young), r10);
  }
}

TEST(Rough, Sewing) {
  const auto path = matrix_path(6, 8, 0.75, 9);
  const auto g = delta1(path);
  const auto s1 = sewing_at(g, 8, 0.25, 1.0);
  EXPECT_LE(maxabs(s1.value), 1e-13);
  EXPECT_LE(s1.cauchy, 1e-13);
  const auto lam = sewing_apply(g, 6);
  EXPECT_LE(maxabs(lam(0, 256)), 1e-13);
  EXPECT_TRUE(lam(32, 32).isZero(0.0));

  const auto sp = scalar_path(0.75, 12, 10);
  const Grid2Fn germ(12, [&sp](long i, long j) -> Eigen::MatrixXd { return sp.at(i) * (sp.at(j) - sp.at(i)); });
  for (int L : {8, 12}) {
    const auto sv = sewing_at(germ, L, 0.0, 1.0);
    const double d = sc(sp.at(4096) - sp.at(0));
    double qv = 0.0;
    const long stride = 1L << (12 - L);
    for (long i = 0; i < 4096; i += stride) {
      const double e = sc(sp.at(i + stride) - sp.at(i));
      qv += e * e;
    }
    EXPECT_NEAR(sc(sv.value), -0.5 * d * d + 0.5 * qv, 1e-12);
    EXPECT_LE(sv.cauchy, sv.cauchy_prev + 1e-12);
  }
  EXPECT_NEAR(sewing_constant(2.0), 2.0 + 4.0 * M_PI * M_PI / 6.0, 1e-12);
  EXPECT_THROW(sewing_constant(1.0), ParameterError);
  EXPECT_THROW(sewing_at(germ, 1, 0.0, 1.0), ParameterError);

  // a germ whose dyadic sums blow up is rejected
  const Grid2Fn bad(6, [](long i, long j) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, std::sqrt(double(j - i)));
  });
  EXPECT_THROW(sewing_at(bad, 6, 0.0, 1.0), RegimeError);
}

TEST(Rough, RateEstimate) {
  RateSeries geo, flat;
  for (int n = 1; n <= 6; ++n) {
    geo.add(n, std::ldexp(1.0, -n));
    flat.add(n, 0.3);
  }
  EXPECT_NEAR(rate_estimate(geo), -1.0, 1e-12);
  EXPECT_NEAR(rate_estimate(flat), 0.0, 1e-12);
  RateSeries small;
  for (int n = 1; n <= 3; ++n) small.add(n, 1.0);
  EXPECT_THROW(rate_estimate(small), ParameterError);
  flat.add(7, 0.0);
  EXPECT_THROW(rate_estimate(flat), ParameterError);
}

TEST(Rough, YoungApproximationRate) {
  const double H = 0.75, eps = 0.3;
  const auto path = matrix_path(16, 12, H, 11);
  const Poly P({0.0, 1.0}), Q({1.0, 0.5});
  const Eigen::MatrixXd ref = lebesgue_integral(path, 12, outer(P, Q), 0.0, 1.0);
  RateSeries rs;
  for (int n = 4; n <= 9; ++n) rs.add(n, operator_norm(lebesgue_integral(path, n, outer(P, Q), 0.0, 1.0) - ref));
  EXPECT_LE(rate_estimate(rs), -eps + 0.1);
}

TEST(Rough, LevyAreaDifferenceTrend) {
  const int d = 32, reps = 100;
  for (double H : {0.1, 0.2, 0.3, 0.4}) {
    MatrixEnsembleConfig cfg{d, 7, H, 12, reps};
    const FbmSampler sampler(H, cfg.grid());
    std::vector<double> stat(7, 0.0);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    for (int r = 0; r < reps; ++r) {
      const auto path = sample_matrix_path(cfg, sampler, r);
      for (int n = 3; n <= 6; ++n) {
        const Eigen::MatrixXd D = level_diff(path, n, 0, 1L << n, I).by_increments;
        stat[n] += trace_state(D * D.transpose()) / reps;
      }
    }
    const double ratio = std::pow(stat[6] / stat[3], 1.0 / 3.0);
    const double expected = std::pow(2.0, 1 - 4 * H);
    EXPECT_NEAR(ratio / expected, 1.0, 0.25) << H;
    if (H <= 0.25) EXPECT_GT(stat[6], stat[3]);
    else EXPECT_LT(stat[6], stat[3]);
  }
}

TEST(Rough, AdaptedMatrix) {
  const auto path = matrix_path(4, 3, 0.4, 13);
  const Word w{Letter::at(0.25), Letter::increment(0.125, 0.5)};
  const Eigen::MatrixXd m = adapted_matrix(path, w, 0.5);
  EXPECT_LE(maxabs(m - path.at(2) * (path.at(4) - path.at(1))), 1e-15);
  EXPECT_THROW(adapted_matrix(path, w, 0.375), ParameterError);
  EXPECT_THROW(adapted_matrix(path, Word{Letter::at(0.3)}, 1.0), GridError);
}
