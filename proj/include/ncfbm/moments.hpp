#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ncfbm/kernel.hpp"

namespace ncfbm {

/// Ordered product of letters X_{i_1} ... X_{i_r}.
using Word = std::vector<Letter>;

/// Real linear combination of words; the multilinear expansion of a
/// polynomial element such as a Riemann sum.
struct WordSum {
  std::vector<std::pair<double, Word>> terms;

  WordSum& add(double coef, Word w) {
    terms.emplace_back(coef, std::move(w));
    return *this;
  }
  /// Adjoint: every word reversed (letters are self-adjoint).
  WordSum adjoint() const;
  std::size_t max_length() const;
};

inline constexpr int kWickWordCap = 20;
inline constexpr int kQWickWordCap = 16;

/// Value of a trace evaluation together with the number of pairings it sums.
struct MomentValue {
  double value = 0.0;
  std::uint64_t pairings = 0;
};

/// Sum over non-crossing pairings of prod cov(p,q), by the interval recursion
/// on the first index's partner. `cov` is the Gram matrix of word positions.
double noncrossing_pairing_sum(const Eigen::MatrixXd& cov);

/// Sum over all pairings of q^{crossings} prod cov(p,q).
double q_pairing_sum(const Eigen::MatrixXd& cov, double q);

/// phi(w) for a semicircular family with covariance K.
double wick_moment(const CovKernel& K, const Word& w);
MomentValue wick_moment_counted(const CovKernel& K, const Word& w);
double wick_moment(const CovKernel& K, const WordSum& ws);

/// phi(w) for the q-Gaussian family with covariance K; q in (-1,1).
double q_wick_moment(const CovKernel& K, const Word& w, double q);
MomentValue q_wick_moment_counted(const CovKernel& K, const Word& w, double q);
double q_wick_moment(const CovKernel& K, const WordSum& ws, double q);

/// phi((A A*)^r)^{1/(2r)} for r = 1..r_max, A given as a word sum. For a
/// self-adjoint A this is phi(A^{2r})^{1/(2r)}, which increases to ||A||.
std::vector<double> norm_estimate(const CovKernel& K, const WordSum& element, int r_max);
std::vector<double> norm_estimate(const CovKernel& K, const Letter& element, int r_max);

/// Heuristic: extrapolates a_r ~ a + b/r from the last two entries. Not a bound.
double richardson_limit(const std::vector<double>& seq);

struct SemicircleLaw {
  double variance;
  explicit SemicircleLaw(double var);
  double radius() const;  // 2 sigma
};

double semicircle_density(const SemicircleLaw& law, double x);

/// 0 for odd k, catalan(k/2) sigma^k for even k.
double semicircle_moment(const SemicircleLaw& law, int k);

/// Parses "c1*X(t1)+c2*X(t2);dX(s,t);X(0.5)" into a word.
Word parse_word(const std::string& spec);

}  // namespace ncfbm
