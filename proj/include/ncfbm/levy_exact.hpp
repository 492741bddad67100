#pragma once

#include <optional>
#include <utility>

namespace ncfbm {

/// Γ_H(k) = A(k)^2 - A(k-1) A(k+1) with A(m) = 2|m|^{2H} - |m+1|^{2H} - |m-1|^{2H}.
/// For |k| >= 8 it is evaluated as -|k|^{4H} f_H(1/|k|) with f_H summed from
/// its power series, since the direct form cancels like 1/k^2.
double gamma_H(double H, long k);

/// Coefficient L with Γ_H(k) ~ L k^{4H-6} as k -> infinity:
/// L = (2H-2) (2H(2H-1))^2.
double gamma_H_leading(double H);

/// f_H(x) = [2(1-x)^{2H}-1-(1-2x)^{2H}] [2(1+x)^{2H}-1-(1+2x)^{2H}]
///          - [2-(1+x)^{2H}-(1-x)^{2H}]^2, x in [0, 1/2].
double f_H(double H, double x);

/// Same expression on [0,1] with |1-2x| in place of 1-2x, so that
/// Γ_H(k) = -k^{4H} f(1/k) can also be checked at k = 1.
double f_H_abs(double H, double x);

/// (Γ_H(0) - ζ(3)/2) / 2^{4H+3}: the constant of the divergence lower bound.
double levy_gap_lower_constant(double H);

/// phi(D D*) with D = X2^{(n+1)}_{01}[1] - X2^{(n)}_{01}[1] for the NC-fBm.
struct LevyGap {
  double H = 0.0;
  int n = 0;
  double value = 0.0;
};

inline constexpr int kClosedFormMaxLevel = 40;
inline constexpr int kWickOracleMaxLevel = 14;
inline constexpr int kLiteralOracleMaxLevel = 6;
inline constexpr int kWordOracleMaxLevel = 4;

/// Closed form 2^{n(1-4H)}/2^{4H+3} {Γ(0) + 2 sum_{k<2^n} (1-k/2^n) Γ(2k)},
/// compensated summation. Beyond k = 2^22 the sum is continued with the
/// power series of Γ_H in 1/k and Euler-Maclaurin sums of k^p.
LevyGap m_n_closed(double H, int n);

/// Δ^{(n)}(i,j) from kernel covariances of the level-(n+1) increments.
double levy_delta(double H, int n, long i, long j);

/// 1/2 sum_{i,j} Δ^{(n)}(i,j) with the sum folded along j-i (O(2^n)).
LevyGap m_n_wick_oracle(double H, int n);

/// The literal O(4^n) double sum over (i,j); n <= 6.
LevyGap m_n_wick_literal(double H, int n);

/// 1/4 sum_{i,j} phi((Y_{2i}Y_{2i+1} - Y_{2i+1}Y_{2i})(Y_{2j+1}Y_{2j} - Y_{2j}Y_{2j+1}))
/// through the non-crossing moment engine on four-letter words; n <= 4.
LevyGap m_n_word_oracle(double H, int n);

/// Exact covariance sums over the level-(n+1) increments Y_{2i}, Y_{2i+1},
/// i = k..l-1 (window [k/2^n, l/2^n]), compared with their bound shapes.
struct IncrementCovaDiag {
  double u = 0.0, v = 0.0;
  double sum_even = 0.0;  // sum_i phi(dX_{uv} Y_{2i})^2
  double sum_odd = 0.0;   // sum_i phi(dX_{uv} Y_{2i+1})^2
  double bound = 0.0;     // |v-u|^{2H} |t-s|^{2H-eps} / 2^{n eps}
  double ratio = 0.0;
};

struct CovaSumDiag {
  double H = 0.0;
  int n = 0;
  long k = 0, l = 0;
  double eps = 0.0;
  double sum_even_even = 0.0;  // sum_{i,j} phi(Y_{2i} Y_{2j})^2
  double sum_even_odd = 0.0;   // sum_{i,j} phi(Y_{2i} Y_{2j+1})^2
  double sum_odd_odd = 0.0;    // sum_{i,j} phi(Y_{2i+1} Y_{2j+1})^2
  /// |t-s|^{4H-2eps} / 2^{2n eps}; NaN (with ratio NaN) unless eps in (0, 2H-1/2).
  double pair_bound = 0.0;
  double pair_ratio = 0.0;
  std::optional<IncrementCovaDiag> increment;
};

/// eps must lie in [0,H). When `u,v` are given they must satisfy 0 <= u <= v <= k/2^n.
CovaSumDiag cova_sum_diag(double H, int n, long k, long l, double eps,
                          std::optional<std::pair<double, double>> increment = std::nullopt);

}  // namespace ncfbm
