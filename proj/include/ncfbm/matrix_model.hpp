#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace ncfbm {

/// Seeds a 64-bit Mersenne twister from a splitmix64 hash of the four keys,
/// so each (seed, entry, replica) stream is reproducible on its own.
std::mt19937_64 keyed_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Exact Gaussian sampler for fBm on a fixed grid.
///
/// Uniform grids k/N use circulant embedding of the increment covariance
/// (one FFT of length 2N per path). Other grids factor the covariance matrix
/// by a symmetric eigendecomposition, clipping eigenvalues in [-1e-10, 0) to 0.
class FbmSampler {
 public:
  enum class Method { Auto, Eigen, Circulant };

  FbmSampler(double H, std::vector<double> times, Method method = Method::Auto);

  const std::vector<double>& times() const { return times_; }
  double hurst() const { return H_; }
  Method method() const { return method_; }

  /// Values at every grid time (X = 0 at t = 0).
  void draw(std::mt19937_64& rng, double* out) const;
  std::vector<double> draw(std::mt19937_64& rng) const;

 private:
  void factor_eigen();
  void factor_circulant();

  double H_;
  std::vector<double> times_;
  Method method_;
  std::vector<std::size_t> positive_;  // indices of times > 0
  Eigen::MatrixXd factor_;             // eigen route: C = F F^T
  std::vector<double> sqrt_eig_;       // circulant route: sqrt(lambda / 2N)
  long n_cells_ = 0;
  double cell_ = 0.0;
};

inline constexpr std::size_t kMaxGridSize = (1u << 14) + 1;

/// `count` independent paths on `times`; path p uses the stream keyed by (seed, p).
std::vector<std::vector<double>> sample_fbm_path(double H, const std::vector<double>& times,
                                                 std::uint64_t seed, int count);

struct MatrixEnsembleConfig {
  int d = 64;
  int level = 8;
  double H = 0.5;
  std::uint64_t seed = 1;
  int replicas = 1;

  /// Throws ParameterError unless d >= 2, 0 <= level <= 14, replicas >= 1, H in (0,1).
  void validate() const;
  std::vector<double> grid() const;  // i / 2^level
};

/// Symmetric matrices on the dyadic grid of `level`.
struct MatrixPath {
  int level = 0;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> mats;

  int dim() const { return mats.empty() ? 0 : static_cast<int>(mats.front().rows()); }
  long cells() const { return 1L << level; }
  /// Matrix at grid index i (time i / 2^level).
  const Eigen::MatrixXd& at(long i) const { return mats[static_cast<std::size_t>(i)]; }
};

/// Entries B(i,j), i <= j, are independent fBm paths; off-diagonal entries are
/// scaled by 1/sqrt(d) and diagonal ones by sqrt(2/d).
MatrixPath sample_matrix_path(const MatrixEnsembleConfig& cfg, int replica = 0);
MatrixPath sample_matrix_path(const MatrixEnsembleConfig& cfg, const FbmSampler& sampler,
                              int replica);

/// (1/d) Tr A
double trace_state(const Eigen::MatrixXd& A);

/// Largest singular value; for symmetric input the largest |eigenvalue|.
/// Full eigensolve for d <= 256, power iteration on A^T A above.
double operator_norm(const Eigen::MatrixXd& A);

struct Histogram {
  std::vector<double> left, right, density;
};

/// Eigenvalue histogram over [lo, hi] normalized to a density (bins >= 10).
/// Without a range the extremal eigenvalues are used.
Histogram spectral_histogram(const Eigen::MatrixXd& A, int bins);
Histogram spectral_histogram(const Eigen::MatrixXd& A, int bins, double lo, double hi);

/// (1/d) Tr A^k for k = 1..kmax from the eigenvalues.
std::vector<double> spectral_moments(const Eigen::MatrixXd& A, int kmax);

/// Piecewise-linear interpolation X^{(n)} of a matrix path along the level-n grid.
class DyadicInterpolant {
 public:
  DyadicInterpolant(const MatrixPath& path, int n);

  int level() const { return n_; }
  Eigen::MatrixXd operator()(double t) const;
  /// X^{(n)} at a node of the path grid (index on the path's own level).
  Eigen::MatrixXd at_index(long i) const;

 private:
  const MatrixPath* path_;
  int n_;
  long stride_;
};

DyadicInterpolant interpolate_dyadic(const MatrixPath& path, int n);

}  // namespace ncfbm
