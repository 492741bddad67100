#include "ncfbm/matrix_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "ncfbm/errors.hpp"
#include "ncfbm/kernel.hpp"
#include "ncfbm/parallel.hpp"

namespace ncfbm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool is_uniform_grid(const std::vector<double>& t, long& cells) {
  if (t.size() < 3 || t.front() != 0.0) return false;
  cells = static_cast<long>(t.size()) - 1;
  const double h = t.back() / static_cast<double>(cells);
  if (!(h > 0.0)) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::fabs(t[i] - static_cast<double>(i) * h) > 1e-13 * std::max(1.0, t.back())) return false;
  }
  return true;
}

constexpr double kEigenClip = -1e-10;
constexpr std::size_t kEigenGridCap = 2049;

}  // namespace

std::mt19937_64 keyed_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

FbmSampler::FbmSampler(double H, std::vector<double> times, Method method)
    : H_(H), times_(std::move(times)), method_(method) {
  if (!(H > 0.0 && H < 1.0)) throw ParameterError("Hurst index must lie in (0,1)");
  if (times_.empty()) throw ParameterError("sampler needs at least one grid time");
  if (times_.size() > kMaxGridSize) {
    throw SizeLimitError("grid of " + std::to_string(times_.size()) + " points exceeds the cap " +
                         std::to_string(kMaxGridSize));
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] < 0.0) throw ParameterError("grid times must be nonnegative");
    if (i > 0 && !(times_[i] > times_[i - 1])) throw ParameterError("grid must be increasing");
  }
  long cells = 0;
  const bool uniform = is_uniform_grid(times_, cells);
  if (method_ == Method::Auto) method_ = uniform ? Method::Circulant : Method::Eigen;
  if (method_ == Method::Circulant) {
    if (!uniform) throw ParameterError("circulant sampling needs a uniform grid starting at 0");
    n_cells_ = cells;
    cell_ = times_.back() / static_cast<double>(cells);
    factor_circulant();
  } else {
    factor_eigen();
  }
}

void FbmSampler::factor_eigen() {
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] > 0.0) positive_.push_back(i);
  }
  if (positive_.size() > kEigenGridCap) {
    throw SizeLimitError("eigen factorization limited to " + std::to_string(kEigenGridCap) +
                         " grid points; use a uniform grid");
  }
  const auto m = static_cast<Eigen::Index>(positive_.size());
  Eigen::MatrixXd C(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      C(a, b) = C(b, a) = fbm_cov(H_, times_[positive_[a]], times_[positive_[b]]);
    }
  }
  if (m == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues();
  const double lmin = lam.minCoeff();
  if (lmin < kEigenClip) {
    // One retry with a jitter on the diagonal.
    C.diagonal().array() += 1e-12;
    es.compute(C);
    lam = es.eigenvalues();
    if (lam.minCoeff() < kEigenClip) {
      std::ostringstream os;
      os << "fBm covariance is not positive semidefinite: smallest eigenvalue " << lam.minCoeff();
      throw NumericError(os.str());
    }
  }
  lam = lam.cwiseMax(0.0).cwiseSqrt();
  factor_ = es.eigenvectors() * lam.asDiagonal();
}

void FbmSampler::factor_circulant() {
  const long N = n_cells_;
  const long M = 2 * N;
  const double p = 2.0 * H_;
  auto gamma = [p](long k) {
    const double x = static_cast<double>(k);
    return 0.5 * (abs_pow(x + 1.0, p) + abs_pow(x - 1.0, p) - 2.0 * abs_pow(x, p));
  };
  std::vector<std::complex<double>> row(static_cast<std::size_t>(M)), spec;
  for (long j = 0; j <= N; ++j) row[j] = gamma(j);
  for (long j = N + 1; j < M; ++j) row[j] = gamma(M - j);
  Eigen::FFT<double> fft;
  fft.fwd(spec, row);
  double lmax = 0.0;
  for (const auto& z : spec) lmax = std::max(lmax, z.real());
  sqrt_eig_.resize(static_cast<std::size_t>(M));
  for (long j = 0; j < M; ++j) {
    double lam = spec[j].real();
    if (lam < kEigenClip * std::max(1.0, lmax)) {
      std::ostringstream os;
      os << "circulant embedding has a negative eigenvalue " << lam;
      throw NumericError(os.str());
    }
    sqrt_eig_[j] = std::sqrt(std::max(lam, 0.0) / static_cast<double>(M));
  }
}

void FbmSampler::draw(std::mt19937_64& rng, double* out) const {
  std::normal_distribution<double> normal;
  if (method_ == Method::Circulant) {
    const long N = n_cells_;
    const long M = 2 * N;
    thread_local Eigen::FFT<double> fft;
    std::vector<std::complex<double>> z(static_cast<std::size_t>(M)), w;
    for (long j = 0; j < M; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      z[j] = sqrt_eig_[j] * std::complex<double>(re, im);
    }
    fft.fwd(w, z);
    const double scale = std::pow(cell_, H_);
    double x = 0.0;
    out[0] = 0.0;
    for (long i = 0; i < N; ++i) {
      x += scale * w[i].real();
      out[i + 1] = x;
    }
    return;
  }
  const auto m = static_cast<Eigen::Index>(positive_.size());
  Eigen::VectorXd g(m);
  for (Eigen::Index a = 0; a < m; ++a) g(a) = normal(rng);
  const Eigen::VectorXd x = m > 0 ? Eigen::VectorXd(factor_ * g) : Eigen::VectorXd();
  std::fill(out, out + times_.size(), 0.0);
  for (Eigen::Index a = 0; a < m; ++a) out[positive_[a]] = x(a);
}

std::vector<double> FbmSampler::draw(std::mt19937_64& rng) const {
  std::vector<double> out(times_.size());
  draw(rng, out.data());
  return out;
}

std::vector<std::vector<double>> sample_fbm_path(double H, const std::vector<double>& times,
                                                 std::uint64_t seed, int count) {
  if (count < 1) throw ParameterError("sample_fbm_path needs count >= 1");
  const FbmSampler sampler(H, times);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(count));
  parallel_for(out.size(), [&](std::size_t p) {
    auto rng = keyed_rng(seed, p, 0, 0);
    out[p] = sampler.draw(rng);
  });
  return out;
}

void MatrixEnsembleConfig::validate() const {
  if (d < 2) throw ParameterError("matrix dimension d must be >= 2");
  if (level < 0 || level > 14) throw ParameterError("level must lie in [0,14]");
  if (replicas < 1) throw ParameterError("replicas must be >= 1");
  if (!(H > 0.0 && H < 1.0)) {
    std::ostringstream os;
    os << "Hurst index must lie in the open interval (0,1), got H=" << H;
    throw ParameterError(os.str());
  }
}

std::vector<double> MatrixEnsembleConfig::grid() const {
  const long N = 1L << level;
  std::vector<double> t(static_cast<std::size_t>(N + 1));
  for (long i = 0; i <= N; ++i) t[i] = std::ldexp(static_cast<double>(i), -level);
  return t;
}

MatrixPath sample_matrix_path(const MatrixEnsembleConfig& cfg, int replica) {
  cfg.validate();
  const FbmSampler sampler(cfg.H, cfg.grid());
  return sample_matrix_path(cfg, sampler, replica);
}

MatrixPath sample_matrix_path(const MatrixEnsembleConfig& cfg, const FbmSampler& sampler,
                              int replica) {
  cfg.validate();
  const auto grid = cfg.grid();
  if (sampler.times() != grid || sampler.hurst() != cfg.H) {
    throw ParameterError("sampler does not match the ensemble grid");
  }
  const int d = cfg.d;
  MatrixPath path;
  path.level = cfg.level;
  path.times = grid;
  path.mats.assign(grid.size(), Eigen::MatrixXd::Zero(d, d));
  const double off = 1.0 / std::sqrt(static_cast<double>(d));
  const double diag = std::sqrt(2.0 / static_cast<double>(d));
  const std::size_t entries = static_cast<std::size_t>(d) * (d + 1) / 2;
  parallel_for(entries, [&](std::size_t e) {
    // e enumerates the upper triangle row by row.
    int i = 0;
    std::size_t rest = e;
    while (rest >= static_cast<std::size_t>(d - i)) {
      rest -= static_cast<std::size_t>(d - i);
      ++i;
    }
    const int j = i + static_cast<int>(rest);
    auto rng = keyed_rng(cfg.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j),
                         static_cast<std::uint64_t>(replica));
    std::vector<double> x(grid.size());
    sampler.draw(rng, x.data());
    const double s = (i == j) ? diag : off;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      path.mats[k](i, j) = s * x[k];
      path.mats[k](j, i) = s * x[k];
    }
  });
  path.mats[0].setZero();
  return path;
}

double trace_state(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw ParameterError("trace_state needs a square matrix");
  return A.trace() / static_cast<double>(A.rows());
}

double operator_norm(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw ParameterError("operator_norm needs a square matrix");
  if (A.size() == 0) return 0.0;
  const bool symmetric = (A - A.transpose()).cwiseAbs().maxCoeff() == 0.0;
  const Eigen::Index d = A.rows();
  if (d <= 256) {
    if (symmetric) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  // Power iteration on A^T A; the start vector is fixed for reproducibility.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) += 0.01 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();
  double est = 0.0;
  constexpr int kMaxIter = 10000;
  for (int it = 1; it <= kMaxIter; ++it) {
    Eigen::VectorXd w = A.transpose() * (A * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = std::sqrt(v.dot(w));
    v = w / nw;
    if (std::fabs(next - est) <= 1e-10 * next) return next;
    est = next;
  }
  throw NumericError("operator_norm: power iteration did not converge after " +
                     std::to_string(kMaxIter) + " iterations");
}

Histogram spectral_histogram(const Eigen::MatrixXd& A, int bins) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const auto& lam = es.eigenvalues();
  double lo = lam.minCoeff(), hi = lam.maxCoeff();
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  return spectral_histogram(A, bins, lo, hi);
}

Histogram spectral_histogram(const Eigen::MatrixXd& A, int bins, double lo, double hi) {
  if (bins < 10) throw ParameterError("spectral_histogram needs bins >= 10");
  if (!(hi > lo)) throw ParameterError("spectral_histogram needs hi > lo");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const auto& lam = es.eigenvalues();
  const double w = (hi - lo) / bins;
  Histogram h;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < lo || lam(i) > hi) continue;
    const int b = std::min(bins - 1, static_cast<int>((lam(i) - lo) / w));
    counts[b] += 1.0;
  }
  const double n = static_cast<double>(lam.size());
  for (int b = 0; b < bins; ++b) {
    h.left.push_back(lo + b * w);
    h.right.push_back(lo + (b + 1) * w);
    h.density.push_back(counts[b] / (n * w));
  }
  return h;
}

std::vector<double> spectral_moments(const Eigen::MatrixXd& A, int kmax) {
  if (kmax < 1) throw ParameterError("spectral_moments needs kmax >= 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const auto& lam = es.eigenvalues();
  std::vector<double> out(static_cast<std::size_t>(kmax), 0.0);
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < kmax; ++k) {
      p *= lam(i);
      out[k] += p;
    }
  }
  for (double& m : out) m /= static_cast<double>(lam.size());
  return out;
}

DyadicInterpolant::DyadicInterpolant(const MatrixPath& path, int n) : path_(&path), n_(n) {
  if (n < 0 || n > path.level) {
    throw ParameterError("interpolation level " + std::to_string(n) + " exceeds the path level " +
                         std::to_string(path.level));
  }
  stride_ = 1L << (path.level - n);
}

Eigen::MatrixXd DyadicInterpolant::operator()(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("interpolant time must lie in [0,1]");
  const long cells = 1L << n_;
  const double scaled = std::ldexp(t, n_);
  long i = std::min(cells - 1, static_cast<long>(std::floor(scaled)));
  const double frac = scaled - static_cast<double>(i);
  const auto& a = path_->at(i * stride_);
  if (frac == 0.0) return a;
  const auto& b = path_->at((i + 1) * stride_);
  return a + frac * (b - a);
}

Eigen::MatrixXd DyadicInterpolant::at_index(long i) const {
  const long q = i / stride_;
  const long r = i % stride_;
  const auto& a = path_->at(q * stride_);
  if (r == 0) return a;
  const double frac = static_cast<double>(r) / static_cast<double>(stride_);
  return a + frac * (path_->at((q + 1) * stride_) - a);
}

DyadicInterpolant interpolate_dyadic(const MatrixPath& path, int n) { return DyadicInterpolant(path, n); }

}  // namespace ncfbm
