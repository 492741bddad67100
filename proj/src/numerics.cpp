#include "ncfbm/numerics.hpp"

#include <Eigen/Dense>

#include "ncfbm/errors.hpp"

namespace ncfbm {

double tree_sum(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return tree_sum(xs.first(half)) + tree_sum(xs.subspan(half));
}

double ls_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ParameterError("ls_slope needs two equally long series of >= 2 points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw ParameterError("ls_slope: abscissae are all equal");
  return sxy / sxx;
}

GaussRule gauss_legendre01(int npoints) {
  if (npoints < 1) throw ParameterError("Gauss rule needs at least one node");
  // Jacobi matrix of the Legendre recurrence on [-1,1].
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(npoints, npoints);
  for (int k = 1; k < npoints; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule rule;
  for (int k = 0; k < npoints; ++k) {
    const double x = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    rule.nodes.push_back(0.5 * (x + 1.0));
    rule.weights.push_back(v * v);  // 2 v^2 on [-1,1], halved on [0,1]
  }
  return rule;
}

}  // namespace ncfbm
