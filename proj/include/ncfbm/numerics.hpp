#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace ncfbm {

/// Neumaier-compensated running sum.
class KahanSum {
 public:
  KahanSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Pairwise (tree) reduction; the result depends only on the input order.
double tree_sum(std::span<const double> xs);

/// Least-squares slope of ys against xs.
double ls_slope(std::span<const double> xs, std::span<const double> ys);

/// Gauss-Legendre nodes and weights on [0,1] (Golub-Welsch).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre01(int npoints);

inline constexpr double kZeta3 = 1.2020569031595942853997;

}  // namespace ncfbm
