#include "ncfbm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ncfbm/errors.hpp"
#include "ncfbm/numerics.hpp"

namespace ncfbm {

namespace {

void check_hurst(double H) {
  if (!(H > 0.0 && H < 1.0)) {
    std::ostringstream os;
    os << "Hurst index must lie in the open interval (0,1), got H=" << H;
    throw ParameterError(os.str());
  }
}

long floor_index(long n, double t) {
  // t = 1 must include index n even when n*t rounds just below an integer.
  return static_cast<long>(std::floor(static_cast<double>(n) * t + 1e-9));
}

}  // namespace

double abs_pow(double x, double p) {
  const double a = std::fabs(x);
  if (a == 0.0) return 0.0;
  return std::exp(p * std::log(a));
}

double fbm_cov(double H, double s, double t) {
  check_hurst(H);
  if (s < 0.0 || t < 0.0) throw ParameterError("fbm_cov needs nonnegative times");
  const double p = 2.0 * H;
  return 0.5 * (abs_pow(s, p) + abs_pow(t, p) - abs_pow(t - s, p));
}

SequenceRule fgn_rule(double H) {
  check_hurst(H);
  const double p = 2.0 * H;
  return {"fgn", H, [p](long k) {
            const double x = static_cast<double>(k);
            return 0.5 * (abs_pow(x + 1.0, p) + abs_pow(x - 1.0, p) - 2.0 * abs_pow(x, p));
          }};
}

SequenceRule white_noise_rule() {
  return {"white", 0.5, [](long k) { return k == 0 ? 1.0 : 0.0; }};
}

double partial_sum_cov(const SequenceRule& rule, long n, double s, double t) {
  if (n <= 0) throw ParameterError("partial_sum_cov needs n >= 1, got " + std::to_string(n));
  if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0) {
    throw ParameterError("partial_sum_cov needs s,t in [0,1]");
  }
  const long a = floor_index(n, s);
  const long b = floor_index(n, t);
  // sum_{1<=k<=a, 1<=l<=b} rho(k-l), grouped by d = k-l.
  KahanSum acc;
  for (long d = -(b - 1); d <= a - 1; ++d) {
    const long lo = std::max(1L, 1 - d);
    const long hi = std::min(b, a - d);
    if (hi < lo) continue;
    acc += static_cast<double>(hi - lo + 1) * rule.rho(d);
  }
  return acc.value() / std::pow(static_cast<double>(n), 2.0 * rule.hurst);
}

CovKernel CovKernel::fbm(double H) {
  check_hurst(H);
  return CovKernel(Fbm{H});
}

CovKernel CovKernel::stationary_sum(SequenceRule rule, long n) {
  if (n <= 0) throw ParameterError("stationary_sum kernel needs n >= 1");
  return CovKernel(StationarySum{std::move(rule), n});
}

CovKernel CovKernel::tabulated(std::vector<double> grid, Eigen::MatrixXd values) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  if (m < 2 || values.rows() != m || values.cols() != m) {
    throw ParameterError("tabulated kernel needs a grid of >= 2 points and a matching square table");
  }
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw ParameterError("tabulated kernel grid must be strictly increasing");
  }
  return CovKernel(Tabulated{std::move(grid), std::move(values)});
}

double CovKernel::operator()(double s, double t) const {
  struct Visitor {
    double s, t;
    double operator()(const Fbm& k) const { return fbm_cov(k.hurst, s, t); }
    double operator()(const StationarySum& k) const { return partial_sum_cov(k.rule, k.n, s, t); }
    double operator()(const Tabulated& k) const {
      const auto& g = k.grid;
      auto locate = [&](double x, std::size_t& i, double& w) {
        if (x < g.front() - 1e-12 || x > g.back() + 1e-12) {
          throw ParameterError("time outside the tabulated kernel grid");
        }
        auto it = std::upper_bound(g.begin(), g.end(), x);
        i = static_cast<std::size_t>(std::distance(g.begin(), it));
        i = std::clamp<std::size_t>(i, 1, g.size() - 1) - 1;
        w = std::clamp((x - g[i]) / (g[i + 1] - g[i]), 0.0, 1.0);
      };
      std::size_t i = 0, j = 0;
      double wi = 0.0, wj = 0.0;
      locate(s, i, wi);
      locate(t, j, wj);
      const auto& v = k.values;
      const auto I = static_cast<Eigen::Index>(i);
      const auto J = static_cast<Eigen::Index>(j);
      return (1 - wi) * (1 - wj) * v(I, J) + wi * (1 - wj) * v(I + 1, J) +
             (1 - wi) * wj * v(I, J + 1) + wi * wj * v(I + 1, J + 1);
    }
  };
  return std::visit(Visitor{s, t}, kind_);
}

double CovKernel::hurst() const {
  if (const auto* f = std::get_if<Fbm>(&kind_)) return f->hurst;
  if (const auto* p = std::get_if<StationarySum>(&kind_)) return p->rule.hurst;
  throw ParameterError("tabulated kernels carry no Hurst index");
}

std::string CovKernel::describe() const {
  std::ostringstream os;
  if (const auto* f = std::get_if<Fbm>(&kind_)) {
    os << "fbm(H=" << f->hurst << ")";
  } else if (const auto* p = std::get_if<StationarySum>(&kind_)) {
    os << "stationary_sum(" << p->rule.name << ", H=" << p->rule.hurst << ", n=" << p->n << ")";
  } else {
    os << "tabulated(" << std::get<Tabulated>(kind_).grid.size() << " points)";
  }
  return os.str();
}

Letter Letter::at(double t, double coef) { return Letter{{{coef, t}}}; }

Letter Letter::increment(double s, double t) { return Letter{{{1.0, t}, {-1.0, s}}}.canonical(); }

Letter Letter::canonical() const {
  std::vector<Term> sorted = terms;
  for (const auto& term : sorted) {
    if (!(term.time >= 0.0 && term.time <= 1.0)) {
      throw ParameterError("letter time outside [0,1]");
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Term& a, const Term& b) { return a.time < b.time; });
  Letter out;
  for (const auto& term : sorted) {
    if (!out.terms.empty() && out.terms.back().time == term.time) {
      out.terms.back().coef += term.coef;
    } else {
      out.terms.push_back(term);
    }
  }
  std::erase_if(out.terms, [](const Term& term) { return term.coef == 0.0; });
  return out;
}

Letter& Letter::operator+=(const Letter& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  *this = canonical();
  return *this;
}

Letter& Letter::operator*=(double a) {
  for (auto& term : terms) term.coef *= a;
  *this = canonical();
  return *this;
}

double letter_cov(const CovKernel& K, const Letter& a, const Letter& b) {
  double acc = 0.0;
  for (const auto& x : a.terms) {
    for (const auto& y : b.terms) acc += x.coef * y.coef * K(x.time, y.time);
  }
  return acc;
}

Eigen::MatrixXd letter_gram(const CovKernel& K, const std::vector<Letter>& letters) {
  const auto n = static_cast<Eigen::Index>(letters.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      g(i, j) = letter_cov(K, letters[static_cast<std::size_t>(i)], letters[static_cast<std::size_t>(j)]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

}  // namespace ncfbm
