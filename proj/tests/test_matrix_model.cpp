#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ncfbm/errors.hpp"
#include "ncfbm/kernel.hpp"
#include "ncfbm/matrix_model.hpp"

using namespace ncfbm;

namespace {

std::vector<double> dyadic_grid(int level) {
  std::vector<double> g;
  for (long i = 0; i <= (1L << level); ++i) g.push_back(std::ldexp(double(i), -level));
  return g;
}

Eigen::MatrixXd random_symmetric(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = n01(rng) / std::sqrt(double(d));
  return A;
}

}  // namespace

TEST(MatrixModel, FbmVarianceAtOne) {
  const auto paths = sample_fbm_path(0.3, dyadic_grid(4), 7, 10000);
  double s2 = 0.0;
  for (const auto& p : paths) s2 += p.back() * p.back();
  EXPECT_NEAR(s2 / paths.size(), 1.0, 0.05);
  for (const auto& p : paths) EXPECT_EQ(p.front(), 0.0);
}

TEST(MatrixModel, BrownianIncrementsUncorrelated) {
  const auto g = dyadic_grid(3);
  const auto paths = sample_fbm_path(0.5, g, 8, 10000);
  double sab = 0, saa = 0, sbb = 0;
  for (const auto& p : paths) {
    const double a = p[2] - p[1], b = p[6] - p[5];
    sab += a * b;
    saa += a * a;
    sbb += b * b;
  }
  EXPECT_LE(std::fabs(sab / std::sqrt(saa * sbb)), 0.05);
}

TEST(MatrixModel, Deterministic) {
  const auto a = sample_fbm_path(0.4, dyadic_grid(5), 99, 3);
  const auto b = sample_fbm_path(0.4, dyadic_grid(5), 99, 3);
  EXPECT_EQ(a, b);
  MatrixEnsembleConfig cfg{8, 3, 0.35, 5, 1};
  const auto m1 = sample_matrix_path(cfg), m2 = sample_matrix_path(cfg);
  for (std::size_t i = 0; i < m1.mats.size(); ++i) EXPECT_TRUE(m1.mats[i] == m2.mats[i]);
  EXPECT_FALSE(sample_matrix_path(cfg, 1).mats.back() == m1.mats.back());
}

TEST(MatrixModel, CirculantAndEigenAgree) {
  const double H = 0.3;
  const auto g = dyadic_grid(3);
  const FbmSampler circ(H, g, FbmSampler::Method::Circulant);
  const FbmSampler eig(H, g, FbmSampler::Method::Eigen);
  EXPECT_EQ(FbmSampler(H, g).method(), FbmSampler::Method::Circulant);
  EXPECT_EQ(FbmSampler(H, {0.0, 0.3, 0.7}).method(), FbmSampler::Method::Eigen);
  const int reps = 20000;
  for (const FbmSampler* s : {&circ, &eig}) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(9, 9);
    auto rng = keyed_rng(3, 1, 2, 3);
    for (int r = 0; r < reps; ++r) {
      const auto x = s->draw(rng);
      const Eigen::Map<const Eigen::VectorXd> v(x.data(), 9);
      cov += v * v.transpose();
    }
    cov /= reps;
    for (int i = 1; i < 9; ++i)
      for (int j = 1; j < 9; ++j) EXPECT_NEAR(cov(i, j), fbm_cov(H, g[i], g[j]), 0.04);
  }
}

TEST(MatrixModel, SamplerErrors) {
  EXPECT_THROW(FbmSampler(1.2, dyadic_grid(2)), ParameterError);
  EXPECT_THROW(FbmSampler(0.3, {0.0, 0.5, 0.4}), ParameterError);
  EXPECT_THROW(FbmSampler(0.3, {0.0, 0.3, 0.7}, FbmSampler::Method::Circulant), ParameterError);
  EXPECT_THROW(FbmSampler(0.3, dyadic_grid(15)), SizeLimitError);
  MatrixEnsembleConfig cfg;
  cfg.d = 1;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.level = 15;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(MatrixModel, TraceOfSquareExpectation) {
  const double H = 0.4;
  MatrixEnsembleConfig cfg{64, 2, H, 17, 200};
  const FbmSampler sampler(H, cfg.grid());
  for (long i : {1L, 2L, 4L}) {
    const double t = i / 4.0;
    std::vector<double> v;
    for (int r = 0; r < cfg.replicas; ++r) {
      const auto path = sample_matrix_path(cfg, sampler, r);
      v.push_back(trace_state(path.at(i) * path.at(i)));
    }
    double mean = 0, var = 0;
    for (double x : v) mean += x;
    mean /= v.size();
    for (double x : v) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / (v.size() - 1) / v.size());
    EXPECT_LE(std::fabs(mean - std::pow(t, 2 * H) * (1 + 1.0 / 64)), 3 * se) << t;
  }
}

TEST(MatrixModel, PathStructure) {
  MatrixEnsembleConfig cfg{16, 4, 0.3, 2, 1};
  const auto path = sample_matrix_path(cfg);
  EXPECT_EQ(path.dim(), 16);
  EXPECT_EQ(path.cells(), 16);
  EXPECT_TRUE(path.at(0).isZero(0.0));
  for (const auto& M : path.mats) EXPECT_EQ((M - M.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(MatrixModel, TraceState) {
  EXPECT_EQ(trace_state(Eigen::MatrixXd::Identity(7, 7)), 1.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd A(6, 6), B(6, 6);
  for (int i = 0; i < 36; ++i) {
    A(i) = n01(rng);
    B(i) = n01(rng);
  }
  EXPECT_NEAR(trace_state(A * B), trace_state(B * A), 1e-12);
  EXPECT_GE(trace_state(A * A.transpose()), 0.0);
  EXPECT_LE(std::fabs(trace_state(A)), operator_norm(A));
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(5, 5);
  EXPECT_EQ(trace_state(Z * Z.transpose()), 0.0);
  EXPECT_LE(Z.cwiseAbs().maxCoeff(), 1e-12);
  // faithfulness proxy on a tiny nonzero matrix
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(5, 5);
  T(2, 3) = 1e-7;
  EXPECT_GT(trace_state(T * T.transpose()), 0.0);
}

TEST(MatrixModel, OperatorNorm) {
  Eigen::MatrixXd D = Eigen::Vector3d(3, -5, 1).asDiagonal();
  EXPECT_NEAR(operator_norm(D), 5.0, 1e-14);
  const Eigen::MatrixXd A = random_symmetric(300, 12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const double ref = es.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(operator_norm(A), ref, 1e-6 * ref);
  for (int d : {4, 20, 300}) {
    const Eigen::MatrixXd S = random_symmetric(d, d);
    EXPECT_LE(std::fabs(trace_state(S)), operator_norm(S) + 1e-15);
  }
}

TEST(MatrixModel, Histogram) {
  const Eigen::MatrixXd A = random_symmetric(200, 3);
  for (const auto& h : {spectral_histogram(A, 25), spectral_histogram(A, 40, -3.0, 3.0)}) {
    double mass = 0.0;
    for (std::size_t b = 0; b < h.density.size(); ++b) mass += h.density[b] * (h.right[b] - h.left[b]);
    EXPECT_NEAR(mass, 1.0, 1e-9);
  }
  EXPECT_THROW(spectral_histogram(A, 5), ParameterError);
  const auto mom = spectral_moments(A, 4);
  ASSERT_EQ(mom.size(), 4u);
  EXPECT_NEAR(mom[1], trace_state(A * A), 1e-12);
  EXPECT_NEAR(mom[0], trace_state(A), 1e-12);
}

TEST(MatrixModel, Interpolation) {
  MatrixEnsembleConfig cfg{6, 4, 0.35, 9, 1};
  const auto path = sample_matrix_path(cfg);
  const auto full = interpolate_dyadic(path, 4);
  for (long i = 0; i <= 16; ++i) EXPECT_TRUE(full(i / 16.0).isApprox(path.at(i), 1e-15) || path.at(i).isZero());
  const auto coarse = interpolate_dyadic(path, 0);
  for (double t : {0.0, 0.2, 0.5, 1.0}) EXPECT_LE((coarse(t) - t * path.at(16)).cwiseAbs().maxCoeff(), 1e-15);
  const auto mid = interpolate_dyadic(path, 2);
  EXPECT_LE((mid(0.375) - 0.5 * (path.at(4) + path.at(8))).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((mid.at_index(6) - mid(0.375)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(interpolate_dyadic(path, 5), ParameterError);
}

TEST(MatrixModel, InterpolationBounds) {
  for (double H : {0.3, 0.5}) {
    MatrixEnsembleConfig cfg{256, 8, H, 31, 1};
    const auto path = sample_matrix_path(cfg);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> node(0, 256);
    std::uniform_int_distribution<int> lev(0, 8);
    const double eps = H / 2;
    for (int k = 0; k < 50; ++k) {
      long a = node(rng), b = node(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      const int n = lev(rng);
      const double s = a / 256.0, t = b / 256.0;
      const auto Xn = interpolate_dyadic(path, n);
      const Eigen::MatrixXd dn = Xn(t) - Xn(s);
      EXPECT_LE(operator_norm(dn), 6 * std::pow(t - s, H) * 1.25);
      const Eigen::MatrixXd err = dn - (path.at(b) - path.at(a));
      EXPECT_LE(operator_norm(err), 8 * std::pow(t - s, H - eps) * std::pow(2.0, -n * eps) * 1.25);
    }
  }
}

TEST(MatrixModel, KeyedStreamsDiffer) {
  auto a = keyed_rng(1, 2, 3, 4), b = keyed_rng(1, 2, 4, 3), c = keyed_rng(1, 2, 3, 4);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_EQ(x, c());
}
