#pragma once

#include "dlra/numerics.hpp"

#include <span>

namespace dlra {

/// Problem sizes for the manifold of m x n matrices of rank r.
struct Dims {
  Index m = 0;
  Index n = 0;
  Index r = 0;

  bool operator==(const Dims&) const = default;
};

/// Throws ShapeError unless 1 <= r <= min(m, n).
void validate(const Dims& dims);

/// Rank-r matrix in compact factored form U S V^T. U (m x r) and V (n x r)
/// have orthonormal columns; S (r x r) is invertible and may be a general
/// square matrix between operations. After renormalize() S is diagonal with
/// nonincreasing nonnegative entries.
struct FixedRankPoint {
  Matrix U;
  Matrix S;
  Matrix V;
  /// Set by truncated_svd when the spectral gap sigma_r - sigma_{r+1} is
  /// below 1e-12 * sigma_1, i.e. the metric projection is near-ill-defined.
  bool gap_warning = false;

  Index rows() const { return U.rows(); }
  Index cols() const { return V.rows(); }
  Index rank() const { return S.rows(); }
  Dims dims() const { return {rows(), cols(), rank()}; }
};

/// Tangent vector at a base point Y = U S V^T, stored as the triple
/// (M, Up, Vp) with embedding U M V^T + Up V^T + U Vp^T and gauge
/// conditions U^T Up = 0, V^T Vp = 0.
///
/// Tangent vectors at a common base form a vector space; the arithmetic
/// operators below assume both operands share the base point.
struct TangentVector {
  Matrix M;
  Matrix Up;
  Matrix Vp;

  static TangentVector zero(const Dims& dims);

  TangentVector& operator+=(const TangentVector& rhs);
  TangentVector& operator-=(const TangentVector& rhs);
  TangentVector& operator*=(double a);

  friend TangentVector operator+(TangentVector lhs, const TangentVector& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend TangentVector operator-(TangentVector lhs, const TangentVector& rhs) {
    lhs -= rhs;
    return lhs;
  }
  friend TangentVector operator*(double a, TangentVector t) {
    t *= a;
    return t;
  }
  friend TangentVector operator*(TangentVector t, double a) {
    t *= a;
    return t;
  }
};

/// Sum of low-rank products: represents left * right^T with left (m x p)
/// and right (n x p). Carrier for X + Z combinations and Runge-Kutta stage
/// sums without forming dense m x n matrices.
struct LowRankSum {
  Matrix left;
  Matrix right;

  static LowRankSum zero(Index m, Index n);
  static LowRankSum of_point(const FixedRankPoint& y, double coef = 1.0);

  Index rows() const { return left.rows(); }
  Index cols() const { return right.rows(); }
  Index terms() const { return left.cols(); }

  /// Appends coef * (U S V^T).
  void add_point(const FixedRankPoint& y, double coef = 1.0);
  /// Appends coef * (the embedding of a tangent vector at `base`);
  /// contributes at most 2r terms.
  void add_tangent(const FixedRankPoint& base, const TangentVector& t, double coef = 1.0);
  /// Appends coef * (l * r^T).
  void add_product(const Matrix& l, const Matrix& r, double coef = 1.0);

  Matrix dense() const;
};

// ---------------------------------------------------------------------------
// Core operations

/// Dense m x n matrix U S V^T.
Matrix embed(const FixedRankPoint& y);

/// Dense embedding U M V^T + Up V^T + U Vp^T of a tangent vector at y.
Matrix embed_tangent(const FixedRankPoint& y, const TangentVector& t);

/// Orthogonal projection of an ambient matrix onto the tangent space at y:
/// M = U^T Z V, Up = (I - U U^T) Z V, Vp = (I - V V^T) Z^T U.
TangentVector tangent_project(const FixedRankPoint& y, const Matrix& z);

/// Same projection for a factored argument; never forms an m x n matrix.
TangentVector tangent_project(const FixedRankPoint& y, const LowRankSum& z);

/// Z minus the embedding of its tangent projection.
Matrix normal_part(const FixedRankPoint& y, const Matrix& z);

/// Riemannian (= Frobenius trace) inner product of two tangent vectors at y.
double inner(const FixedRankPoint& y, const TangentVector& a, const TangentVector& b);

/// Norm induced by `inner`; valid because the three components are mutually
/// orthogonal under the gauge conditions.
double tangent_norm(const TangentVector& t);

/// Rank-r truncated SVD (metric projection onto the manifold). Throws
/// RankDeficiencyError when sigma_r vanishes; sets gap_warning on the result
/// when sigma_r - sigma_{r+1} < 1e-12 * sigma_1.
FixedRankPoint truncated_svd(const Matrix& a, Index r);

/// Truncated SVD of a factored sum: QR of both factors and an SVD of the
/// small core; cost is independent of m * n.
FixedRankPoint truncated_svd(const LowRankSum& a, Index r);

/// Weingarten map W_y(t, n) for a tangent vector t and a normal vector n.
/// If n fails the normal-space check (tolerance 1e-10 relative) it is
/// normal-projected first. Throws RankDeficiencyError for singular S.
TangentVector weingarten(const FixedRankPoint& y, const TangentVector& t, const Matrix& n);

/// Frobenius norm of the normal component of a field value at y; the
/// irreducible part of the DLRA error.
double modeling_error(const FixedRankPoint& y, const Matrix& field_value);

/// Small SVD of S absorbed into the outer factors: returns the same matrix
/// with S diagonal, nonnegative, nonincreasing. Throws RankDeficiencyError
/// when S is numerically singular.
FixedRankPoint renormalize(const FixedRankPoint& y);

/// Seeded random point: U, V from QR-orthonormalized Gaussian matrices,
/// S = diag(singular_values). Values must be strictly positive.
FixedRankPoint random_point(const Dims& dims, std::span<const double> singular_values,
                            std::uint64_t seed);

/// Seeded random tangent vector at y, rescaled to the requested norm.
TangentVector random_tangent(const FixedRankPoint& y, std::uint64_t seed, double target_norm);

// ---------------------------------------------------------------------------
// Validation helpers (used by tests and assertions; cost O(m r^2))

/// Column orthonormality of U, V and invertibility of S.
bool satisfies_point_invariants(const FixedRankPoint& y, double tol = 1e-12);

/// Gauge conditions U^T Up = 0, V^T Vp = 0 relative to the base point.
bool is_tangent_at(const FixedRankPoint& y, const TangentVector& t, double tol = 1e-12);

/// Smallest singular value of S (= sigma_r of the represented matrix).
double smallest_singular_value(const FixedRankPoint& y);

}  // namespace dlra
