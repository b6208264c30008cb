#include "dlra/manifold.hpp"

#include "dlra/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dlra {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_same_shape(const char* op, Index am, Index an, Index bm, Index bn) {
  if (am != bm || an != bn)
    throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(am) + "x" +
                     std::to_string(an) + " vs " + std::to_string(bm) + "x" +
                     std::to_string(bn) + ")");
}

void check_tangent_shapes(const char* op, const FixedRankPoint& y, const TangentVector& t) {
  const Index m = y.rows(), n = y.cols(), r = y.rank();
  if (t.M.rows() != r || t.M.cols() != r || t.Up.rows() != m || t.Up.cols() != r ||
      t.Vp.rows() != n || t.Vp.cols() != r)
    throw ShapeError(std::string(op) + ": tangent vector does not match base point");
}

FixedRankPoint assemble_truncation(const Matrix& u_full, const Vector& sv, const Matrix& v_full,
                                   Index r, const char* op) {
  const Index k = sv.size();
  if (r < 1 || r > k) throw ShapeError(std::string(op) + ": invalid target rank");
  const double s1 = sv(0);
  if (!(sv(r - 1) > s1 * kEps) || s1 == 0.0)
    throw RankDeficiencyError(std::string(op) + ": sigma_r vanishes (rank collapse)");
  FixedRankPoint out;
  out.U = u_full.leftCols(r);
  out.S = sv.head(r).asDiagonal();
  out.V = v_full.leftCols(r);
  const double next = (r < k) ? sv(r) : 0.0;
  out.gap_warning = (sv(r - 1) - next) < 1e-12 * s1;
  return out;
}

}  // namespace

void validate(const Dims& dims) {
  if (dims.r < 1 || dims.r > std::min(dims.m, dims.n))
    throw ShapeError("Dims: require 1 <= r <= min(m, n)");
}

TangentVector TangentVector::zero(const Dims& dims) {
  TangentVector t;
  t.M = Matrix::Zero(dims.r, dims.r);
  t.Up = Matrix::Zero(dims.m, dims.r);
  t.Vp = Matrix::Zero(dims.n, dims.r);
  return t;
}

TangentVector& TangentVector::operator+=(const TangentVector& rhs) {
  check_same_shape("TangentVector::+=", Up.rows(), Vp.rows(), rhs.Up.rows(), rhs.Vp.rows());
  M += rhs.M;
  Up += rhs.Up;
  Vp += rhs.Vp;
  return *this;
}

TangentVector& TangentVector::operator-=(const TangentVector& rhs) {
  check_same_shape("TangentVector::-=", Up.rows(), Vp.rows(), rhs.Up.rows(), rhs.Vp.rows());
  M -= rhs.M;
  Up -= rhs.Up;
  Vp -= rhs.Vp;
  return *this;
}

TangentVector& TangentVector::operator*=(double a) {
  M *= a;
  Up *= a;
  Vp *= a;
  return *this;
}

LowRankSum LowRankSum::zero(Index m, Index n) {
  LowRankSum s;
  s.left = Matrix(m, 0);
  s.right = Matrix(n, 0);
  return s;
}

LowRankSum LowRankSum::of_point(const FixedRankPoint& y, double coef) {
  LowRankSum s = zero(y.rows(), y.cols());
  s.add_point(y, coef);
  return s;
}

void LowRankSum::add_product(const Matrix& l, const Matrix& r, double coef) {
  check_same_shape("LowRankSum::add_product", left.rows(), right.rows(), l.rows(), r.rows());
  if (l.cols() != r.cols()) throw ShapeError("LowRankSum::add_product: term count mismatch");
  const Index p = left.cols(), q = l.cols();
  left.conservativeResize(Eigen::NoChange, p + q);
  right.conservativeResize(Eigen::NoChange, p + q);
  left.rightCols(q) = coef * l;
  right.rightCols(q) = r;
}

void LowRankSum::add_point(const FixedRankPoint& y, double coef) {
  add_product(y.U * y.S, y.V, coef);
}

void LowRankSum::add_tangent(const FixedRankPoint& base, const TangentVector& t, double coef) {
  check_tangent_shapes("LowRankSum::add_tangent", base, t);
  // U M V^T + Up V^T + U Vp^T = [U M + Up | U] [V | Vp]^T
  const Index r = base.rank();
  Matrix l(base.rows(), 2 * r), rr(base.cols(), 2 * r);
  l.leftCols(r) = base.U * t.M + t.Up;
  l.rightCols(r) = base.U;
  rr.leftCols(r) = base.V;
  rr.rightCols(r) = t.Vp;
  add_product(l, rr, coef);
}

Matrix LowRankSum::dense() const { return left * right.transpose(); }

Matrix embed(const FixedRankPoint& y) { return y.U * y.S * y.V.transpose(); }

Matrix embed_tangent(const FixedRankPoint& y, const TangentVector& t) {
  check_tangent_shapes("embed_tangent", y, t);
  return y.U * (t.M * y.V.transpose() + t.Vp.transpose()) + t.Up * y.V.transpose();
}

TangentVector tangent_project(const FixedRankPoint& y, const Matrix& z) {
  check_same_shape("tangent_project", y.rows(), y.cols(), z.rows(), z.cols());
  TangentVector t;
  const Matrix zv = z * y.V;                    // m x r
  const Matrix ztu = z.transpose() * y.U;       // n x r
  t.M = y.U.transpose() * zv;                   // U^T Z V
  t.Up = zv - y.U * t.M;                        // (I - U U^T) Z V
  t.Vp = ztu - y.V * (y.V.transpose() * ztu);   // (I - V V^T) Z^T U
  return t;
}

TangentVector tangent_project(const FixedRankPoint& y, const LowRankSum& z) {
  check_same_shape("tangent_project", y.rows(), y.cols(), z.rows(), z.cols());
  TangentVector t;
  const Matrix rv = z.right.transpose() * y.V;  // p x r
  const Matrix lu = z.left.transpose() * y.U;   // p x r
  const Matrix zv = z.left * rv;                // m x r
  const Matrix ztu = z.right * lu;              // n x r
  t.M = y.U.transpose() * zv;
  t.Up = zv - y.U * t.M;
  t.Vp = ztu - y.V * (y.V.transpose() * ztu);
  return t;
}

Matrix normal_part(const FixedRankPoint& y, const Matrix& z) {
  return z - embed_tangent(y, tangent_project(y, z));
}

double inner(const FixedRankPoint& y, const TangentVector& a, const TangentVector& b) {
  check_tangent_shapes("inner", y, a);
  check_tangent_shapes("inner", y, b);
  return a.M.cwiseProduct(b.M).sum() + a.Up.cwiseProduct(b.Up).sum() +
         a.Vp.cwiseProduct(b.Vp).sum();
}

double tangent_norm(const TangentVector& t) {
  return std::sqrt(t.M.squaredNorm() + t.Up.squaredNorm() + t.Vp.squaredNorm());
}

FixedRankPoint truncated_svd(const Matrix& a, Index r) {
  if (r < 1 || r > std::min(a.rows(), a.cols()))
    throw ShapeError("truncated_svd: invalid target rank");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return assemble_truncation(svd.matrixU(), svd.singularValues(), svd.matrixV(), r,
                             "truncated_svd");
}

FixedRankPoint truncated_svd(const LowRankSum& a, Index r) {
  if (r < 1 || r > std::min(a.rows(), a.cols()))
    throw ShapeError("truncated_svd: invalid target rank");
  if (a.terms() < r)
    throw RankDeficiencyError("truncated_svd: factored sum has fewer than r terms");
  const ThinQr ql = thin_qr(a.left);
  const ThinQr qr = thin_qr(a.right);
  const Matrix core = ql.R * qr.R.transpose();  // p x p
  Eigen::BDCSVD<Matrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  FixedRankPoint out = assemble_truncation(svd.matrixU(), svd.singularValues(), svd.matrixV(),
                                           r, "truncated_svd");
  out.U = ql.Q * out.U;
  out.V = qr.Q * out.V;
  return out;
}

TangentVector weingarten(const FixedRankPoint& y, const TangentVector& t, const Matrix& n) {
  check_tangent_shapes("weingarten", y, t);
  check_same_shape("weingarten", y.rows(), y.cols(), n.rows(), n.cols());

  Matrix normal = n;
  const double scale = std::max(1.0, normal.norm());
  if ((y.U.transpose() * normal).norm() > 1e-10 * scale ||
      (normal * y.V).norm() > 1e-10 * scale) {
    normal = normal_part(y, normal);
  }

  Eigen::FullPivLU<Matrix> lu(y.S);
  if (!lu.isInvertible()) throw RankDeficiencyError("weingarten: singular S");
  const Matrix s_inv = lu.inverse();

  // W_y(t, n) = N Vp S^{-T} V^T + U S^{-T} Up^T N, obtained by
  // differentiating the tangent projector along a curve with velocity t
  // (factor kinematics dU = Up S^{-1}, dV = Vp S^{-T}).
  TangentVector w;
  w.M = Matrix::Zero(y.rank(), y.rank());
  w.Up = normal * (t.Vp * s_inv.transpose());
  w.Vp = normal.transpose() * (t.Up * s_inv);
  return w;
}

double modeling_error(const FixedRankPoint& y, const Matrix& field_value) {
  return normal_part(y, field_value).norm();
}

FixedRankPoint renormalize(const FixedRankPoint& y) {
  Eigen::JacobiSVD<Matrix> svd(y.S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  if (!(sv(y.rank() - 1) > sv(0) * kEps) || sv(0) == 0.0)
    throw RankDeficiencyError("renormalize: S numerically singular");
  FixedRankPoint out;
  out.U = y.U * svd.matrixU();
  out.S = sv.asDiagonal();
  out.V = y.V * svd.matrixV();
  out.gap_warning = y.gap_warning;
  return out;
}

FixedRankPoint random_point(const Dims& dims, std::span<const double> singular_values,
                            std::uint64_t seed) {
  validate(dims);
  if (static_cast<Index>(singular_values.size()) != dims.r)
    throw ShapeError("random_point: need exactly r singular values");
  for (double s : singular_values)
    if (!(s > 0.0)) throw ConfigError("random_point: singular values must be positive");

  Rng rng(seed);
  FixedRankPoint y;
  y.U = thin_qr(rng.gaussian(dims.m, dims.r)).Q;
  y.V = thin_qr(rng.gaussian(dims.n, dims.r)).Q;
  y.S = Matrix::Zero(dims.r, dims.r);
  for (Index i = 0; i < dims.r; ++i) y.S(i, i) = singular_values[i];
  return y;
}

TangentVector random_tangent(const FixedRankPoint& y, std::uint64_t seed, double target_norm) {
  if (target_norm < 0.0) throw ConfigError("random_tangent: negative norm");
  Rng rng(seed);
  TangentVector t;
  t.M = rng.gaussian(y.rank(), y.rank());
  const Matrix gu = rng.gaussian(y.rows(), y.rank());
  const Matrix gv = rng.gaussian(y.cols(), y.rank());
  t.Up = gu - y.U * (y.U.transpose() * gu);
  t.Vp = gv - y.V * (y.V.transpose() * gv);
  if (target_norm == 0.0) return TangentVector::zero(y.dims());
  const double norm = tangent_norm(t);
  if (norm == 0.0) throw RankDeficiencyError("random_tangent: degenerate draw");
  t *= target_norm / norm;
  return t;
}

bool satisfies_point_invariants(const FixedRankPoint& y, double tol) {
  const Index r = y.rank();
  if (y.U.cols() != r || y.V.cols() != r || y.S.cols() != r) return false;
  const Matrix eye = Matrix::Identity(r, r);
  if ((y.U.transpose() * y.U - eye).norm() > tol) return false;
  if ((y.V.transpose() * y.V - eye).norm() > tol) return false;
  return smallest_singular_value(y) > 0.0;
}

bool is_tangent_at(const FixedRankPoint& y, const TangentVector& t, double tol) {
  const Index m = y.rows(), n = y.cols(), r = y.rank();
  if (t.M.rows() != r || t.Up.rows() != m || t.Vp.rows() != n) return false;
  const double scale = std::max(1.0, tangent_norm(t));
  return (y.U.transpose() * t.Up).norm() <= tol * scale &&
         (y.V.transpose() * t.Vp).norm() <= tol * scale;
}

double smallest_singular_value(const FixedRankPoint& y) {
  Eigen::JacobiSVD<Matrix> svd(y.S);
  return svd.singularValues()(y.rank() - 1);
}

}  // namespace dlra
