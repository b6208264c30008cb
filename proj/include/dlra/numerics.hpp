#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace dlra {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr const char* kVersion = "0.1.0";

/// Derives a child seed from a base seed and a path of stream indices
/// (splitmix64 mixing). Used to give every generator its own stream.
std::uint64_t mix_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

/// Deterministic random source. Gaussian variates are produced by an
/// explicit Box-Muller transform on top of mt19937_64 so that the output
/// stream does not depend on the standard library's distribution
/// implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal variate.
  double normal();
  /// Matrix with i.i.d. standard normal entries, filled row by row.
  Matrix gaussian(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Thin QR factorization A = Q R with Q (m x k) column-orthonormal and
/// R (k x k) upper triangular with nonnegative diagonal. The sign
/// convention makes the factorization unique (hence reproducible) for
/// full-rank input.
struct ThinQr {
  Matrix Q;
  Matrix R;

  /// Smallest |R_ii| relative to the largest; a cheap rank-loss indicator.
  double diag_ratio() const;
};

ThinQr thin_qr(const Matrix& a);

/// Least-squares fit of log(y) vs log(x). Points with y <= y_floor are
/// excluded before fitting.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                          double y_floor = 0.0);

/// Percentile with linear interpolation between order statistics.
/// `p` is in [0, 100]. Throws on empty input.
double percentile(std::vector<double> values, double p);

/// Spearman rank correlation (average ranks on ties).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace dlra
