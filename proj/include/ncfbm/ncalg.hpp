#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ncfbm {

inline constexpr int kPolyDegreeCap = 16;

/// P(x) = sum_k coeffs[k] x^k.
struct Poly {
  std::vector<double> coeffs;

  Poly() = default;
  explicit Poly(std::vector<double> c);
  static Poly monomial(int k, double coef = 1.0);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  bool operator==(const Poly&) const = default;
};

/// "0,0,1" -> x^2. Throws ParameterError on malformed lists or degree > cap.
Poly parse_poly(const std::string& spec);

/// Horner evaluation sum_k a_k A^k with A^0 = 1.
Eigen::MatrixXd eval_poly(const Poly& P, const Eigen::MatrixXd& A);

/// sum c U^a (x) U^b
struct TensorPoly {
  struct Term {
    double coef;
    int left;
    int right;
    bool operator==(const Term&) const = default;
  };
  std::vector<Term> terms;

  /// Merge equal power pairs, drop zeros, sort by (left, right).
  TensorPoly canonical() const;
  friend TensorPoly operator+(const TensorPoly& a, const TensorPoly& b);
  bool operator==(const TensorPoly&) const = default;
};

/// dP(U) = sum_k a_k sum_{i<k} U^i (x) U^{k-1-i}
TensorPoly tensor_derivative(const Poly& P);

/// sum_i U_i (x) V_i as explicit matrix pairs.
struct TensorValue {
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> terms;
};

/// Evaluates a tensor polynomial at U; powers of U are computed once.
TensorValue eval_tensor(const TensorPoly& T, const Eigen::MatrixXd& U);

/// (U (x) V) # Y = U Y V, extended linearly.
Eigen::MatrixXd sharp(const TensorValue& T, const Eigen::MatrixXd& Y);

/// phi(V) U W with phi the normalized trace.
Eigen::MatrixXd id_phi_id(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
                          const Eigen::MatrixXd& W);

/// AB - BA
Eigen::MatrixXd commutator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

struct TaylorDefect {
  double first_order = 0.0;
  double second_order = 0.0;
};

/// ||P(V)-P(U)|| / ((1+||U||+||V||)^{p-1} ||V-U||) and
/// ||P(V)-P(U)-dP(U)#(V-U)|| / ((1+||U||+||V||)^{p-2} ||V-U||^2), p = deg P.
/// Both are 0 when V = U.
TaylorDefect taylor_defect(const Poly& P, const Eigen::MatrixXd& U, const Eigen::MatrixXd& V);

/// A^0 .. A^p
std::vector<Eigen::MatrixXd> matrix_powers(const Eigen::MatrixXd& A, int p);

}  // namespace ncfbm
