#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "ncfbm/errors.hpp"
#include "ncfbm/levy_exact.hpp"
#include "ncfbm/numerics.hpp"

using namespace ncfbm;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

Big big_pow(long m, double H) {
  if (m == 0) return Big(0);
  return boost::multiprecision::pow(Big(std::labs(m)), Big(2 * H));
}

Big big_a(long m, double H) { return 2 * big_pow(m, H) - big_pow(m + 1, H) - big_pow(m - 1, H); }

double big_gamma(double H, long k) {
  const Big v = big_a(k, H) * big_a(k, H) - big_a(k - 1, H) * big_a(k + 1, H);
  return v.convert_to<double>();
}

double direct_sum(double H, int n) {
  const long N = 1L << n;
  KahanSum acc;
  acc += gamma_H(H, 0);
  for (long k = 1; k < N; ++k) acc += 2.0 * (1.0 - double(k) / N) * gamma_H(H, 2 * k);
  return std::pow(2.0, n * (1 - 4 * H)) / std::pow(2.0, 4 * H + 3) * acc.value();
}

}  // namespace

TEST(LevyExact, GammaAgainstHighPrecision) {
  for (double H : {0.05, 0.1, 0.25, 0.3, 0.5, 0.75, 0.9}) {
    for (long k = 0; k <= 100; ++k) {
      const double ref = big_gamma(H, k);
      EXPECT_NEAR(gamma_H(H, k), ref, 1e-12 * std::fabs(ref) + 1e-300) << H << " " << k;
    }
    for (long k : {1000L, 100000L, 10000000L}) {
      const double ref = big_gamma(H, k);
      EXPECT_NEAR(gamma_H(H, k), ref, 1e-10 * std::fabs(ref)) << H << " " << k;
    }
  }
}

TEST(LevyExact, GammaExamples) {
  for (double H : {0.1, 0.25, 0.4, 0.8}) {
    const double p = std::pow(2.0, 2 * H);
    EXPECT_NEAR(gamma_H(H, 0), p * (4 - p), 1e-14);
    if (H <= 0.5) EXPECT_GE(gamma_H(H, 0), 3.0);
  }
  EXPECT_NEAR(gamma_H(0.5, 3), 0.0, 1e-15);
  for (double H : {0.1, 0.2, 0.25}) EXPECT_NEAR(gamma_H(H, 5), -std::pow(5.0, 4 * H) * f_H(H, 0.2), 1e-14);
  EXPECT_THROW(gamma_H(1.0, 3), ParameterError);
}

TEST(LevyExact, GammaMatchesF) {
  for (double H : {0.05, 0.2, 0.35, 0.6}) {
    for (long k = 1; k <= 100; ++k) {
      const double g = gamma_H(H, k);
      const double f = k >= 2 ? f_H(H, 1.0 / k) : f_H_abs(H, 1.0);
      EXPECT_LE(std::fabs(g + std::pow(double(k), 4 * H) * f), 1e-10 * (1 + std::fabs(g))) << k;
    }
  }
}

TEST(LevyExact, GammaLeadingOrder) {
  for (double H : {0.2, 0.35, 0.7}) {
    const double L = gamma_H_leading(H);
    const long k = 1000000;
    EXPECT_NEAR(gamma_H(H, k) / (L * std::pow(double(k), 4 * H - 6)), 1.0, 1e-4) << H;
  }
}

TEST(LevyExact, FExamples) {
  EXPECT_EQ(f_H(0.3, 0.0), 0.0);
  EXPECT_LE(std::fabs(f_H(0.25, 0.5)), 0.125);
  EXPECT_LE(std::fabs(f_H(0.1, 0.05)), 2e-4);
  EXPECT_THROW(f_H(0.3, 0.6), ParameterError);
  EXPECT_THROW(f_H(0.3, -0.1), ParameterError);
  EXPECT_THROW(f_H_abs(0.3, 1.1), ParameterError);
  EXPECT_NEAR(f_H_abs(0.3, 0.4), f_H(0.3, 0.4), 1e-15);
}

TEST(LevyExact, FBound) {
  for (double H : {0.05, 0.1, 0.15, 0.2, 0.25}) {
    for (long k = 1; k <= 10000; ++k) {
      const double x = 1.0 / (2.0 * k);
      EXPECT_LE(std::fabs(f_H(H, x)), 2.0 / std::pow(2.0 * k, 4)) << H << " " << k;
    }
  }
}

TEST(LevyExact, ClosedFormExamples) {
  for (double H : {0.1, 0.3, 0.6}) {
    const auto m0 = m_n_closed(H, 0);
    EXPECT_NEAR(m0.value, gamma_H(H, 0) / std::pow(2.0, 4 * H + 3), 1e-15);
    EXPECT_EQ(m0.n, 0);
    EXPECT_EQ(m0.H, H);
  }
  const double ratio = m_n_closed(0.2, 11).value / m_n_closed(0.2, 10).value;
  EXPECT_NEAR(ratio / std::pow(2.0, 0.2), 1.0, 0.02);
  EXPECT_THROW(m_n_closed(0.3, 41), SizeLimitError);
  EXPECT_THROW(m_n_closed(0.0, 2), ParameterError);
}

TEST(LevyExact, LowerBound) {
  for (double H : {0.05, 0.1, 0.2, 0.25}) {
    const double c = levy_gap_lower_constant(H);
    EXPECT_GT(c, 0.0);
    EXPECT_NEAR(c, (gamma_H(H, 0) - 0.5 * kZeta3) / std::pow(2.0, 4 * H + 3), 1e-15);
    for (int n = 0; n <= 20; ++n) {
      EXPECT_GE(m_n_closed(H, n).value, std::pow(2.0, n * (1 - 4 * H)) * c) << H << " " << n;
    }
  }
}

TEST(LevyExact, OracleEquivalence) {
  for (double H : {0.1, 0.2, 0.25, 0.3, 0.4, 0.7}) {
    for (int n = 0; n <= 8; ++n) {
      const double closed = m_n_closed(H, n).value;
      EXPECT_NEAR(m_n_wick_oracle(H, n).value, closed, 1e-12 * closed) << H << " " << n;
      if (n <= kLiteralOracleMaxLevel) {
        EXPECT_NEAR(m_n_wick_literal(H, n).value, closed, 1e-12 * closed) << H << " " << n;
      }
      if (n <= kWordOracleMaxLevel) {
        EXPECT_NEAR(m_n_word_oracle(H, n).value, closed, 1e-11 * closed) << H << " " << n;
      }
    }
    const double c14 = m_n_closed(H, 14).value;
    EXPECT_NEAR(m_n_wick_oracle(H, 14).value, c14, 1e-10 * c14);
  }
  EXPECT_THROW(m_n_wick_oracle(0.3, 15), SizeLimitError);
  EXPECT_THROW(m_n_wick_literal(0.3, 7), SizeLimitError);
  EXPECT_THROW(m_n_word_oracle(0.3, 5), SizeLimitError);
}

TEST(LevyExact, DeltaSymmetry) {
  for (double H : {0.15, 0.45}) {
    for (long i = 0; i < 16; ++i)
      for (long j = 0; j < 16; ++j) EXPECT_EQ(levy_delta(H, 4, i, j), levy_delta(H, 4, j, i));
  }
}

TEST(LevyExact, QuarterHurstBounded) {
  double lo = INFINITY, hi = 0.0;
  for (int n = 0; n <= 12; ++n) {
    const double v = m_n_closed(0.25, n).value;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_GT(lo, 0.226);
  EXPECT_LT(hi, 0.2286);
}

TEST(LevyExact, ConvergenceLaw) {
  for (double H : {0.3, 0.35, 0.4}) {
    double partial = 0.0, last = 0.0, before = 0.0;
    for (int n = 0; n <= 24; ++n) {
      before = last;
      last = std::sqrt(m_n_closed(H, n).value);
      partial += last;
    }
    const double q = std::pow(2.0, (1 - 4 * H) / 2);
    EXPECT_NEAR(last / before, q, 1e-3 * q);
    // geometric tail beyond n = 24
    EXPECT_LT(last * q / (1 - q) / partial, 0.5);
    EXPECT_TRUE(std::isfinite(partial));
  }
}

TEST(LevyExact, TailMatchesDirectSum) {
  for (double H : {0.15, 0.4}) {
    for (int n : {23, 24}) {
      const double direct = direct_sum(H, n);
      EXPECT_NEAR(m_n_closed(H, n).value, direct, 1e-11 * direct) << H << " " << n;
    }
  }
}

TEST(LevyExact, CovaSumDiagnostics) {
  double prev = INFINITY;
  for (int n = 4; n <= 10; ++n) {
    const auto d = cova_sum_diag(0.4, n, 0, 1L << n, 0.1);
    ASSERT_TRUE(std::isfinite(d.pair_ratio));
    EXPECT_LE(d.pair_ratio, prev * (1 + 1e-12)) << n;
    prev = d.pair_ratio;
  }
  for (double H : {0.2, 0.6}) {
    const int n = 5;
    const double h = std::pow(2.0, -(n + 1));
    const auto d = cova_sum_diag(H, n, 7, 8, 0.0);
    const double e = std::pow(h, 2 * H) * (std::pow(2.0, 2 * H - 1) - 1);
    EXPECT_NEAR(d.sum_even_odd, e * e, 1e-15);
    EXPECT_NEAR(d.sum_even_even, std::pow(h, 4 * H), 1e-15);
    EXPECT_TRUE(std::isnan(d.pair_bound));
  }
  const auto inc = cova_sum_diag(0.3, 1, 1, 2, 0.0, std::make_pair(0.0, 0.25));
  ASSERT_TRUE(inc.increment.has_value());
  EXPECT_GT(inc.increment->sum_even, 0.0);
  EXPECT_NEAR(inc.increment->bound, std::pow(0.25, 0.6) * std::pow(0.5, 0.6), 1e-15);
  EXPECT_LT(inc.increment->ratio, 1.0);
  EXPECT_THROW(cova_sum_diag(0.3, 4, 3, 3, 0.1), ParameterError);
  EXPECT_THROW(cova_sum_diag(0.3, 4, 0, 17, 0.1), ParameterError);
  EXPECT_THROW(cova_sum_diag(0.3, 4, 0, 4, 0.3), ParameterError);
  EXPECT_THROW(cova_sum_diag(0.3, 4, 2, 4, 0.0, std::make_pair(0.0, 0.5)), ParameterError);
}
