#include "ncfbm/levy_exact.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "ncfbm/errors.hpp"
#include "ncfbm/kernel.hpp"
#include "ncfbm/moments.hpp"
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

void check_level(int n, int cap, const char* what) {
  if (n < 0) throw ParameterError(std::string(what) + ": level must be >= 0");
  if (n > cap) {
    throw SizeLimitError(std::string(what) + ": level " + std::to_string(n) + " exceeds the cap " +
                         std::to_string(cap));
  }
}

// Even power series f_H(x) = sum_{j>=6} c_j x^j, convergent for |x| < 1/2.
class FSeries {
 public:
  static constexpr int kDegree = 48;

  explicit FSeries(double H) {
    const double a = 2.0 * H;
    std::array<double, kDegree + 1> binom{};
    binom[0] = 1.0;
    for (int j = 0; j < kDegree; ++j) binom[j + 1] = binom[j] * (a - j) / (j + 1);
    // b1 = 2(1-x)^a - 1 - (1-2x)^a, b2(x) = b1(-x), b3 = 2 - (1+x)^a - (1-x)^a.
    std::array<double, kDegree + 1> b1{}, b2{}, b3{};
    for (int j = 2; j <= kDegree; ++j) {
      const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
      b1[j] = binom[j] * sgn * (2.0 - std::ldexp(1.0, j));
      b2[j] = b1[j] * sgn;
      if (j % 2 == 0) b3[j] = -2.0 * binom[j];
    }
    // Orders below 6 and all odd orders vanish identically.
    for (int j = 6; j <= kDegree; j += 2) {
      double s = 0.0;
      for (int i = 2; i <= j - 2; ++i) s += b1[i] * b2[j - i] - b3[i] * b3[j - i];
      c_[j] = s;
    }
  }

  double coef(int j) const { return c_[j]; }

  double operator()(double x) const {
    const double x2 = x * x;
    double acc = 0.0;
    for (int j = kDegree; j >= 6; j -= 2) acc = acc * x2 + c_[j];
    return acc * x2 * x2 * x2;
  }

 private:
  std::array<double, kDegree + 1> c_{};
};

constexpr double kSeriesThreshold = 0.125;

double f_direct(double H, double x) {
  const double a = 2.0 * H;
  const double b1 = 2.0 * abs_pow(1.0 - x, a) - 1.0 - abs_pow(1.0 - 2.0 * x, a);
  const double b2 = 2.0 * abs_pow(1.0 + x, a) - 1.0 - abs_pow(1.0 + 2.0 * x, a);
  const double b3 = 2.0 - abs_pow(1.0 + x, a) - abs_pow(1.0 - x, a);
  return b1 * b2 - b3 * b3;
}

// Extended precision: the small-k direct form still cancels about k^-6.
long double second_diff(long double a, long m) {
  auto p = [a](long double x) { return x == 0.0L ? 0.0L : std::pow(std::fabs(x), a); };
  const auto x = static_cast<long double>(m);
  return 2.0L * p(x) - p(x + 1.0L) - p(x - 1.0L);
}

double gamma_with(const FSeries& fs, double H, long k) {
  const long m = k < 0 ? -k : k;
  if (m >= 8) {
    const double x = 1.0 / static_cast<double>(m);
    return -std::pow(static_cast<double>(m), 4.0 * H) * fs(x);
  }
  const long double a = 2.0L * H;
  const long double am = second_diff(a, m);
  return static_cast<double>(am * am - second_diff(a, m - 1) * second_diff(a, m + 1));
}

// sum_{k=K}^{M} k^p by Euler-Maclaurin; K is large, p < -1.
double power_sum(double p, double K, double M) {
  auto g = [p](double x) { return std::pow(x, p); };
  const double integral = (std::pow(M, p + 1.0) - std::pow(K, p + 1.0)) / (p + 1.0);
  const double d1 = p * (std::pow(M, p - 1.0) - std::pow(K, p - 1.0));
  const double d3 = p * (p - 1.0) * (p - 2.0) * (std::pow(M, p - 3.0) - std::pow(K, p - 3.0));
  return integral + 0.5 * (g(K) + g(M)) + d1 / 12.0 - d3 / 720.0;
}

Letter dyadic_increment(int level, long a) {
  const double h = std::ldexp(1.0, -level);
  return Letter::increment(static_cast<double>(a) * h, static_cast<double>(a + 1) * h);
}

}  // namespace

double gamma_H(double H, long k) {
  check_hurst(H);
  return gamma_with(FSeries(H), H, k);
}

double gamma_H_leading(double H) {
  check_hurst(H);
  const double a = 2.0 * H;
  const double b = a * (a - 1.0);
  return (a - 2.0) * b * b;
}

double f_H(double H, double x) {
  check_hurst(H);
  if (!(x >= 0.0 && x <= 0.5)) {
    throw ParameterError("f_H is defined on [0,1/2], got x=" + std::to_string(x));
  }
  if (x <= kSeriesThreshold) return FSeries(H)(x);
  return f_direct(H, x);
}

double f_H_abs(double H, double x) {
  check_hurst(H);
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ParameterError("f_H_abs is defined on [0,1], got x=" + std::to_string(x));
  }
  if (x <= kSeriesThreshold) return FSeries(H)(x);
  return f_direct(H, x);
}

double levy_gap_lower_constant(double H) {
  check_hurst(H);
  return (gamma_H(H, 0) - 0.5 * kZeta3) / std::pow(2.0, 4.0 * H + 3.0);
}

LevyGap m_n_closed(double H, int n) {
  check_hurst(H);
  check_level(n, kClosedFormMaxLevel, "m_n_closed");
  const FSeries fs(H);
  const long N = 1L << n;
  const long direct_max = std::min(N - 1, 1L << 22);
  const double Nd = static_cast<double>(N);
  KahanSum acc;
  for (long k = 1; k <= direct_max; ++k) {
    acc += (1.0 - static_cast<double>(k) / Nd) * gamma_with(fs, H, 2 * k);
  }
  double bracket = gamma_with(fs, H, 0) + 2.0 * acc.value();
  if (direct_max < N - 1) {
    // Γ(2k) = -sum_j c_j (2k)^{4H-j}
    const double K = static_cast<double>(direct_max + 1);
    const double M = Nd - 1.0;
    KahanSum tail;
    for (int j = 6; j <= 14; j += 2) {
      const double p = 4.0 * H - j;
      const double w = -fs.coef(j) * std::pow(2.0, p);
      tail += w * (power_sum(p, K, M) - power_sum(p + 1.0, K, M) / Nd);
    }
    bracket += 2.0 * tail.value();
  }
  const double scale = std::pow(2.0, n * (1.0 - 4.0 * H) - (4.0 * H + 3.0));
  return {H, n, scale * bracket};
}

double levy_delta(double H, int n, long i, long j) {
  check_hurst(H);
  check_level(n, kClosedFormMaxLevel, "levy_delta");
  const long N = 1L << n;
  if (i < 0 || j < 0 || i >= N || j >= N) throw ParameterError("levy_delta: index out of range");
  const CovKernel K = CovKernel::fbm(H);
  const Letter y2i = dyadic_increment(n + 1, 2 * i);
  const Letter y2i1 = dyadic_increment(n + 1, 2 * i + 1);
  const Letter y2j = dyadic_increment(n + 1, 2 * j);
  const Letter y2j1 = dyadic_increment(n + 1, 2 * j + 1);
  return letter_cov(K, y2i, y2j) * letter_cov(K, y2i1, y2j1) -
         letter_cov(K, y2i, y2j1) * letter_cov(K, y2j, y2i1);
}

LevyGap m_n_wick_oracle(double H, int n) {
  check_hurst(H);
  check_level(n, kWickOracleMaxLevel, "m_n_wick_oracle");
  const long N = 1L << n;
  KahanSum acc;
  acc += static_cast<double>(N) * levy_delta(H, n, 0, 0);
  for (long k = 1; k < N; ++k) acc += 2.0 * static_cast<double>(N - k) * levy_delta(H, n, 0, k);
  return {H, n, 0.5 * acc.value()};
}

LevyGap m_n_wick_literal(double H, int n) {
  check_hurst(H);
  check_level(n, kLiteralOracleMaxLevel, "m_n_wick_literal");
  const long N = 1L << n;
  std::vector<Letter> ys;
  for (long a = 0; a < 2 * N; ++a) ys.push_back(dyadic_increment(n + 1, a));
  const Eigen::MatrixXd G = letter_gram(CovKernel::fbm(H), ys);
  KahanSum acc;
  for (long i = 0; i < N; ++i) {
    for (long j = 0; j < N; ++j) {
      acc += G(2 * i, 2 * j) * G(2 * i + 1, 2 * j + 1) - G(2 * i, 2 * j + 1) * G(2 * j, 2 * i + 1);
    }
  }
  return {H, n, 0.5 * acc.value()};
}

LevyGap m_n_word_oracle(double H, int n) {
  check_hurst(H);
  check_level(n, kWordOracleMaxLevel, "m_n_word_oracle");
  const long N = 1L << n;
  WordSum ws;
  for (long i = 0; i < N; ++i) {
    const Letter a = dyadic_increment(n + 1, 2 * i);
    const Letter b = dyadic_increment(n + 1, 2 * i + 1);
    for (long j = 0; j < N; ++j) {
      const Letter c = dyadic_increment(n + 1, 2 * j);
      const Letter e = dyadic_increment(n + 1, 2 * j + 1);
      // (ab - ba)(ec - ce)
      ws.add(0.25, {a, b, e, c});
      ws.add(-0.25, {a, b, c, e});
      ws.add(-0.25, {b, a, e, c});
      ws.add(0.25, {b, a, c, e});
    }
  }
  return {H, n, wick_moment(CovKernel::fbm(H), ws)};
}

CovaSumDiag cova_sum_diag(double H, int n, long k, long l, double eps,
                          std::optional<std::pair<double, double>> increment) {
  check_hurst(H);
  check_level(n, 24, "cova_sum_diag");
  const long N = 1L << n;
  if (!(0 <= k && k < l && l <= N)) {
    throw ParameterError("cova_sum_diag needs 0 <= k < l <= 2^n");
  }
  if (!(eps >= 0.0 && eps < H)) throw ParameterError("cova_sum_diag needs eps in [0,H)");
  const CovKernel K = CovKernel::fbm(H);
  const long W = l - k;
  // g[m] = phi(Y_a Y_{a+m}); stationary in a.
  std::vector<double> g(static_cast<std::size_t>(2 * W));
  const Letter first = dyadic_increment(n + 1, 2 * k);
  for (long m = 0; m < 2 * W; ++m) g[m] = letter_cov(K, first, dyadic_increment(n + 1, 2 * k + m));
  auto gabs = [&](long m) { return g[static_cast<std::size_t>(m < 0 ? -m : m)]; };

  CovaSumDiag out;
  out.H = H;
  out.n = n;
  out.k = k;
  out.l = l;
  out.eps = eps;
  KahanSum ee, eo;
  for (long e = -(W - 1); e <= W - 1; ++e) {
    const double mult = static_cast<double>(W - (e < 0 ? -e : e));
    const double v_ee = gabs(2 * e);
    const double v_eo = gabs(2 * e + 1);
    ee += mult * v_ee * v_ee;
    eo += mult * v_eo * v_eo;
  }
  out.sum_even_even = ee.value();
  out.sum_even_odd = eo.value();
  out.sum_odd_odd = ee.value();

  const double s = static_cast<double>(k) / N;
  const double t = static_cast<double>(l) / N;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (eps > 0.0 && eps < 2.0 * H - 0.5) {
    out.pair_bound = std::pow(t - s, 4.0 * H - 2.0 * eps) * std::pow(2.0, -2.0 * n * eps);
    out.pair_ratio = std::max(out.sum_even_even, out.sum_even_odd) / out.pair_bound;
  } else {
    out.pair_bound = nan;
    out.pair_ratio = nan;
  }

  if (increment) {
    const auto [u, v] = *increment;
    if (!(0.0 <= u && u < v && v <= s + 1e-15)) {
      throw ParameterError("cova_sum_diag needs 0 <= u < v <= s for the increment");
    }
    const Letter duv = Letter::increment(u, v);
    IncrementCovaDiag inc;
    inc.u = u;
    inc.v = v;
    KahanSum se, so;
    for (long i = k; i < l; ++i) {
      const double ce = letter_cov(K, duv, dyadic_increment(n + 1, 2 * i));
      const double co = letter_cov(K, duv, dyadic_increment(n + 1, 2 * i + 1));
      se += ce * ce;
      so += co * co;
    }
    inc.sum_even = se.value();
    inc.sum_odd = so.value();
    inc.bound = std::pow(v - u, 2.0 * H) * std::pow(t - s, 2.0 * H - eps) * std::pow(2.0, -n * eps);
    inc.ratio = std::max(inc.sum_even, inc.sum_odd) / inc.bound;
    out.increment = inc;
  }
  return out;
}

}  // namespace ncfbm
