#include "dlra/numerics.hpp"

#include "dlra/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dlra {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = base;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t p : path) {
    state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    out = splitmix64(state);
  }
  return out;
}

double Rng::uniform() {
  // 53 random bits mapped to [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1 - u lies in (0, 1] so the log is finite.
  const double u = 1.0 - uniform();
  const double v = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * M_PI * v;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Matrix Rng::gaussian(Index rows, Index cols) {
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = normal();
  return out;
}

double ThinQr::diag_ratio() const {
  const Index k = R.rows();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double d = std::abs(R(i, i));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (hi == 0.0) return 0.0;
  return lo / hi;
}

ThinQr thin_qr(const Matrix& a) {
  const Index m = a.rows();
  const Index k = a.cols();
  if (m < k) throw ShapeError("thin_qr: more columns than rows");
  Eigen::HouseholderQR<Matrix> qr(a);
  ThinQr out;
  out.Q = qr.householderQ() * Matrix::Identity(m, k);
  out.R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  // Flip signs so diag(R) >= 0; makes the factorization deterministic.
  for (Index i = 0; i < k; ++i) {
    if (out.R(i, i) < 0.0) {
      out.R.row(i) = -out.R.row(i);
      out.Q.col(i) = -out.Q.col(i);
    }
  }
  return out;
}

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                          double y_floor) {
  if (x.size() != y.size()) throw ShapeError("fit_loglog_slope: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw ConfigError("fit_loglog_slope: nonpositive abscissa");
    if (y[i] > y_floor && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const int n = static_cast<int>(lx.size());
  if (n < 2) throw ConfigError("fit_loglog_slope: fewer than 2 usable points");

  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("fit_loglog_slope: degenerate abscissae");

  SlopeFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double resid = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += resid * resid;
  }
  fit.stderr_slope = (n > 2) ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
  return fit;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw ConfigError("percentile: empty sample");
  if (p < 0.0 || p > 100.0) throw ConfigError("percentile: p out of range");
  std::sort(values.begin(), values.end());
  const double pos = (static_cast<double>(values.size()) - 1.0) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

std::vector<double> ranks_of(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("spearman: size mismatch");
  if (x.size() < 2) throw ConfigError("spearman: need at least 2 points");
  const auto rx = ranks_of(x);
  const auto ry = ranks_of(y);
  const std::size_t n = x.size();
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) throw ConfigError("spearman: constant input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace dlra
