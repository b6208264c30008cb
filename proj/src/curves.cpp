#include "dlra/curves.hpp"

#include "dlra/errors.hpp"

namespace dlra {

FixedRankPoint retraction_curve(RetractionKind kind, const FixedRankPoint& x,
                                const TangentVector& v, const TangentVector& a, double t) {
  return retract(kind, x, t * v + (0.5 * t * t) * a);
}

FixedRankPoint retraction_curve(RetractionKind kind, const FixedRankPoint& x,
                                const TangentVector& v, double t) {
  return retract(kind, x, t * v);
}

FixedRankPoint hermite_eval(const HermiteData& data, RetractionKind kind, double t) {
  if (kind != RetractionKind::Orth)
    throw CapabilityError("hermite_eval: requires a retraction with an inverse (ORTH)");
  const double t0 = data.p0.t, t1 = data.p1.t;
  if (!(t0 < t1)) throw ConfigError("hermite_eval: require t0 < t1");
  const double dt = t1 - t0;
  const double s = (t - t0) / dt;

  // Chart preimages at x0. The inverse orthographic retraction is linear in
  // its argument, so chart velocities are plain tangent projections: the
  // preimage of a manifold curve through x1 with velocity v1 has velocity
  // P(x0) v1 at the preimage of x1. This makes both endpoint positions and
  // velocities of the interpolant exact.
  const FixedRankPoint& x0 = data.p0.x;
  TangentVector w1, u1;
  try {
    w1 = inverse_retract_orth(x0, data.p1.x);
    LowRankSum v1_amb = LowRankSum::zero(x0.rows(), x0.cols());
    v1_amb.add_tangent(data.p1.x, data.p1.v);
    u1 = tangent_project(x0, v1_amb);
  } catch (const Error& e) {
    throw HermiteError(0, e.what());
  }

  // Cubic Bezier control vectors in the chart; the De Casteljau recursion
  // below evaluates the unique cubic Hermite interpolant (s may lie outside
  // [0, 1]).
  const TangentVector b0 = TangentVector::zero(x0.dims());
  const TangentVector b1 = (dt / 3.0) * data.p0.v;
  const TangentVector b2 = w1 - (dt / 3.0) * u1;
  const TangentVector& b3 = w1;

  const auto lerp = [s](const TangentVector& a, const TangentVector& b) {
    return (1.0 - s) * a + s * b;
  };
  const TangentVector c0 = lerp(b0, b1), c1 = lerp(b1, b2), c2 = lerp(b2, b3);
  const TangentVector d0 = lerp(c0, c1), d1 = lerp(c1, c2);
  const TangentVector e = lerp(d0, d1);

  try {
    return retract_orth(x0, e);
  } catch (const Error& err) {
    throw HermiteError(3, err.what());
  }
}

Matrix euclidean_hermite_eval(double t0, const Matrix& a0, const Matrix& v0, double t1,
                              const Matrix& a1, const Matrix& v1, double t) {
  if (t0 == t1) throw ConfigError("euclidean_hermite_eval: t0 == t1");
  const double dt = t1 - t0;
  const double s = (t - t0) / dt;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * a0 + (h10 * dt) * v0 + h01 * a1 + (h11 * dt) * v1;
}

}  // namespace dlra
