#include "dlra/retractions.hpp"

#include "dlra/errors.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace dlra {

namespace {

// Rank-loss guard for the K-/L-step orthonormalizations.
void check_full_rank(const ThinQr& qr, const char* where) {
  if (qr.diag_ratio() < 1e-14)
    throw RankDeficiencyError(std::string(where) + ": rank-deficient orthonormalization");
}

struct KlStep {
  ThinQr k;  // U1 = k.Q, S_U = k.R
  ThinQr l;  // V1 = l.Q, S_V = l.R
};

// Shared first two lines of the KLS and orthographic algorithms.
KlStep k_and_l_steps(const FixedRankPoint& x, const TangentVector& z) {
  KlStep out;
  out.k = thin_qr(x.U * (x.S + z.M) + z.Up);
  check_full_rank(out.k, "K-step");
  out.l = thin_qr(x.V * (x.S + z.M).transpose() + z.Vp);
  check_full_rank(out.l, "L-step");
  return out;
}

}  // namespace

std::string to_string(RetractionKind kind) {
  switch (kind) {
    case RetractionKind::Svd: return "SVD";
    case RetractionKind::Ksl: return "KSL";
    case RetractionKind::Kls: return "KLS";
    case RetractionKind::Orth: return "ORTH";
  }
  return "?";
}

FixedRankPoint retract_svd(const FixedRankPoint& x, const TangentVector& z) {
  const Index r = x.rank();
  const ThinQr qu = thin_qr(z.Up);
  const ThinQr qv = thin_qr(z.Vp);

  Matrix core = Matrix::Zero(2 * r, 2 * r);
  core.topLeftCorner(r, r) = x.S + z.M;
  core.topRightCorner(r, r) = qv.R.transpose();
  core.bottomLeftCorner(r, r) = qu.R;

  Eigen::BDCSVD<Matrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (!(sv(r - 1) > 0.0))
    throw RankDeficiencyError("retract_svd: rank collapse of X + Z");

  Matrix u_basis(x.rows(), 2 * r), v_basis(x.cols(), 2 * r);
  u_basis << x.U, qu.Q;
  v_basis << x.V, qv.Q;

  FixedRankPoint out;
  out.U = u_basis * svd.matrixU().leftCols(r);
  out.S = sv.head(r).asDiagonal();
  out.V = v_basis * svd.matrixV().leftCols(r);
  out.gap_warning = (sv(r - 1) - sv(r)) < 1e-12 * sv(0);
  return out;
}

FixedRankPoint retract_svd(const FixedRankPoint& x, const LowRankSum& step) {
  LowRankSum sum = LowRankSum::of_point(x);
  sum.add_product(step.left, step.right);
  return truncated_svd(sum, x.rank());
}

FixedRankPoint detail::ksl_core(const FixedRankPoint& x, const TangentVector& z) {
  // K-step: U1 S1_hat = U0 (S0 + M) + Up
  const ThinQr k = thin_qr(x.U * (x.S + z.M) + z.Up);
  check_full_rank(k, "KSL K-step");
  const Matrix& u1 = k.Q;

  // S-step: S0_tilde = S1_hat - (U1^T Up + (U1^T U0) M)
  const Matrix u1t_u0 = u1.transpose() * x.U;
  const Matrix s_tilde = k.R - (u1.transpose() * z.Up + u1t_u0 * z.M);

  // L-step: V1 S1^T = V0 S0_tilde^T + Z^T U1, with Z^T U1 kept factored.
  const Matrix zt_u1 =
      x.V * (z.M.transpose() * u1t_u0.transpose() + z.Up.transpose() * u1) +
      z.Vp * u1t_u0.transpose();
  const ThinQr l = thin_qr(x.V * s_tilde.transpose() + zt_u1);
  check_full_rank(l, "KSL L-step");

  FixedRankPoint out;
  out.U = u1;
  out.S = l.R.transpose();
  out.V = l.Q;
  return out;
}

FixedRankPoint detail::kls_core(const FixedRankPoint& x, const TangentVector& z) {
  const KlStep kl = k_and_l_steps(x, z);
  const Matrix& u1 = kl.k.Q;
  const Matrix& v1 = kl.l.Q;
  const Matrix lmat = u1.transpose() * x.U;
  const Matrix rmat = v1.transpose() * x.V;

  // S-step, equivalent to U1^T (X + Z) V1.
  FixedRankPoint out;
  out.U = u1;
  out.S = lmat * ((x.S + z.M) * rmat.transpose() + z.Vp.transpose() * v1) +
          (u1.transpose() * z.Up) * rmat.transpose();
  out.V = v1;
  return out;
}

FixedRankPoint detail::orth_core(const FixedRankPoint& x, const TangentVector& z) {
  const Matrix s0m = x.S + z.M;
  Eigen::FullPivLU<Matrix> lu(s0m);
  if (!lu.isInvertible())
    throw RetractionDomainError("retract_orth: S + M singular, retraction undefined");

  const KlStep kl = k_and_l_steps(x, z);

  FixedRankPoint out;
  out.U = kl.k.Q;
  out.S = kl.k.R * lu.solve(kl.l.R.transpose());
  out.V = kl.l.Q;
  return out;
}

FixedRankPoint retract_ksl(const FixedRankPoint& x, const TangentVector& z) {
  return renormalize(detail::ksl_core(x, z));
}

FixedRankPoint retract_kls(const FixedRankPoint& x, const TangentVector& z) {
  return renormalize(detail::kls_core(x, z));
}

FixedRankPoint retract_orth(const FixedRankPoint& x, const TangentVector& z) {
  return detail::orth_core(x, z);
}

FixedRankPoint retract(RetractionKind kind, const FixedRankPoint& x, const TangentVector& z) {
  switch (kind) {
    case RetractionKind::Svd: return retract_svd(x, z);
    case RetractionKind::Ksl: return retract_ksl(x, z);
    case RetractionKind::Kls: return retract_kls(x, z);
    case RetractionKind::Orth: return retract_orth(x, z);
  }
  throw ConfigError("retract: unknown kind");
}

TangentVector inverse_retract_orth(const FixedRankPoint& x, const FixedRankPoint& y) {
  LowRankSum diff = LowRankSum::of_point(y);
  diff.add_point(x, -1.0);
  return tangent_project(x, diff);
}

double second_order_defect(RetractionKind kind, const FixedRankPoint& x,
                           const TangentVector& z, double t) {
  if (!(t > 0.0)) throw ConfigError("second_order_defect: t must be positive");
  const FixedRankPoint moved = retract(kind, x, t * z);
  LowRankSum remainder = LowRankSum::of_point(moved);
  remainder.add_point(x, -1.0);
  remainder.add_tangent(x, z, -t);
  return tangent_norm(tangent_project(x, remainder));
}

}  // namespace dlra
