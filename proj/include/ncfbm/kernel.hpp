#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ncfbm {

/// |x|^p with 0^p = 0 exactly (p > 0).
double abs_pow(double x, double p);

/// Fractional covariance 1/2 (s^{2H} + t^{2H} - |t-s|^{2H}).
/// Defined for s,t >= 0 so scaling checks can leave [0,1]; H must lie in (0,1).
double fbm_cov(double H, double s, double t);

/// Correlation rule rho(k) of a stationary sequence together with the
/// exponent used to normalize its partial sums by n^{2H}.
struct SequenceRule {
  std::string name;
  double hurst = 0.5;
  std::function<double(long)> rho;
};

/// rho_H(k) = 1/2 (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}), fractional Gaussian noise.
SequenceRule fgn_rule(double H);

/// rho(0) = 1, rho(k) = 0 otherwise; normalized with H = 1/2.
SequenceRule white_noise_rule();

/// Covariance of V^{(n)}_s, V^{(n)}_t where V^{(n)}_t = n^{-H} sum_{k <= floor(nt)} U_k.
double partial_sum_cov(const SequenceRule& rule, long n, double s, double t);

/// A covariance function R(s,t) on [0,1]^2.
class CovKernel {
 public:
  struct Fbm {
    double hurst;
  };
  struct StationarySum {
    SequenceRule rule;
    long n;
  };
  struct Tabulated {
    std::vector<double> grid;
    Eigen::MatrixXd values;
  };

  static CovKernel fbm(double H);
  static CovKernel stationary_sum(SequenceRule rule, long n);
  /// Values on a strictly increasing grid; evaluated by bilinear interpolation.
  static CovKernel tabulated(std::vector<double> grid, Eigen::MatrixXd values);

  double operator()(double s, double t) const;

  bool is_fbm() const { return std::holds_alternative<Fbm>(kind_); }
  /// Hurst index of an fbm or stationary-sum kernel; throws for tabulated ones.
  double hurst() const;
  std::string describe() const;

 private:
  explicit CovKernel(std::variant<Fbm, StationarySum, Tabulated> k) : kind_(std::move(k)) {}
  std::variant<Fbm, StationarySum, Tabulated> kind_;
};

/// Real linear combination sum_k c_k X_{t_k} of process evaluations.
struct Letter {
  struct Term {
    double coef;
    double time;
    bool operator==(const Term&) const = default;
  };
  std::vector<Term> terms;

  static Letter at(double t, double coef = 1.0);
  /// delta X_{st} = X_t - X_s.
  static Letter increment(double s, double t);

  /// Merge equal times, drop zero coefficients, sort by time. Throws
  /// ParameterError for times outside [0,1].
  Letter canonical() const;
  bool empty() const { return terms.empty(); }

  Letter& operator+=(const Letter& o);
  Letter& operator*=(double a);
  friend Letter operator+(Letter a, const Letter& b) { return a += b; }
  friend Letter operator-(Letter a, Letter b) { return a += (b *= -1.0); }
  friend Letter operator*(double a, Letter b) { return b *= a; }
  bool operator==(const Letter&) const = default;
};

/// Bilinear extension sum_{k,l} c_k d_l R(t_k, u_l).
double letter_cov(const CovKernel& K, const Letter& a, const Letter& b);

/// Gram matrix [letter_cov(K, letters[i], letters[j])].
Eigen::MatrixXd letter_gram(const CovKernel& K, const std::vector<Letter>& letters);

}  // namespace ncfbm
