#include "ncfbm/ncalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ncfbm/errors.hpp"
#include "ncfbm/matrix_model.hpp"

namespace ncfbm {

namespace {

void check_square(const Eigen::MatrixXd& A, const char* what) {
  if (A.rows() != A.cols()) throw ParameterError(std::string(what) + ": matrix is not square");
}

void check_same(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const char* what) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw ParameterError(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

Poly::Poly(std::vector<double> c) : coeffs(std::move(c)) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (degree() > kPolyDegreeCap) {
    throw SizeLimitError("polynomial degree " + std::to_string(degree()) + " exceeds the cap " +
                         std::to_string(kPolyDegreeCap));
  }
}

Poly Poly::monomial(int k, double coef) {
  if (k < 0) throw ParameterError("monomial degree must be >= 0");
  std::vector<double> c(static_cast<std::size_t>(k + 1), 0.0);
  c[k] = coef;
  return Poly(std::move(c));
}

Poly parse_poly(const std::string& spec) {
  std::vector<double> c;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParameterError("polynomial coefficient \"" + item + "\" is not a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ParameterError("polynomial coefficient \"" + item + "\" is not a number");
    }
    c.push_back(v);
  }
  if (c.empty()) throw ParameterError("empty coefficient list");
  return Poly(std::move(c));
}

Eigen::MatrixXd eval_poly(const Poly& P, const Eigen::MatrixXd& A) {
  check_square(A, "eval_poly");
  const auto d = A.rows();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  for (int k = P.degree(); k >= 0; --k) {
    acc = acc * A;
    acc.diagonal().array() += P.coeffs[k];
  }
  return acc;
}

TensorPoly TensorPoly::canonical() const {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& t : terms) acc[{t.left, t.right}] += t.coef;
  TensorPoly out;
  for (const auto& [k, c] : acc) {
    if (c != 0.0) out.terms.push_back({c, k.first, k.second});
  }
  return out;
}

TensorPoly operator+(const TensorPoly& a, const TensorPoly& b) {
  TensorPoly out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out.canonical();
}

TensorPoly tensor_derivative(const Poly& P) {
  TensorPoly out;
  for (int k = 1; k <= P.degree(); ++k) {
    if (P.coeffs[k] == 0.0) continue;
    for (int i = 0; i < k; ++i) out.terms.push_back({P.coeffs[k], i, k - 1 - i});
  }
  return out.canonical();
}

std::vector<Eigen::MatrixXd> matrix_powers(const Eigen::MatrixXd& A, int p) {
  check_square(A, "matrix_powers");
  std::vector<Eigen::MatrixXd> pw;
  pw.push_back(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
  for (int k = 1; k <= p; ++k) pw.push_back(pw.back() * A);
  return pw;
}

TensorValue eval_tensor(const TensorPoly& T, const Eigen::MatrixXd& U) {
  int p = 0;
  for (const auto& t : T.terms) p = std::max({p, t.left, t.right});
  const auto pw = matrix_powers(U, p);
  TensorValue out;
  for (const auto& t : T.terms) out.terms.emplace_back(t.coef * pw[t.left], pw[t.right]);
  return out;
}

Eigen::MatrixXd sharp(const TensorValue& T, const Eigen::MatrixXd& Y) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(Y.rows(), Y.cols());
  for (const auto& [U, V] : T.terms) {
    if (U.cols() != Y.rows() || Y.cols() != V.rows()) throw ParameterError("sharp: dimension mismatch");
    acc.noalias() += U * Y * V;
  }
  return acc;
}

Eigen::MatrixXd id_phi_id(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
                          const Eigen::MatrixXd& W) {
  check_same(U, V, "id_phi_id");
  check_same(U, W, "id_phi_id");
  return trace_state(V) * (U * W);
}

Eigen::MatrixXd commutator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  check_same(A, B, "commutator");
  return A * B - B * A;
}

TaylorDefect taylor_defect(const Poly& P, const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
  check_same(U, V, "taylor_defect");
  const double dn = operator_norm(V - U);
  if (dn == 0.0) return {};
  const int p = std::max(P.degree(), 0);
  const double base = 1.0 + operator_norm(U) + operator_norm(V);
  const Eigen::MatrixXd diff = eval_poly(P, V) - eval_poly(P, U);
  const Eigen::MatrixXd lin = sharp(eval_tensor(tensor_derivative(P), U), V - U);
  TaylorDefect out;
  out.first_order = operator_norm(diff) / (std::pow(base, p - 1) * dn);
  if (p <= 1) return out;  // no remainder for affine P
  out.second_order = operator_norm(diff - lin) / (std::pow(base, p - 2) * dn * dn);
  return out;
}

}  // namespace ncfbm
