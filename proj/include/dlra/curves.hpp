#pragma once

#include "dlra/manifold.hpp"
#include "dlra/retractions.hpp"

#include <optional>

namespace dlra {

/// A point on a curve together with its velocity and, optionally, its
/// intrinsic acceleration. `v` and `a` are tangent vectors at `x`.
struct JetData {
  double t = 0.0;
  FixedRankPoint x;
  TangentVector v;
  std::optional<TangentVector> a;
};

/// Two endpoint jets with t0 < t1 (velocities required).
struct HermiteData {
  JetData p0;
  JetData p1;
};

/// The curve t -> R_x(t v + t^2/2 a). For second-order retraction kinds its
/// intrinsic acceleration at t = 0 equals `a`.
FixedRankPoint retraction_curve(RetractionKind kind, const FixedRankPoint& x,
                                const TangentVector& v, const TangentVector& a, double t);

/// Velocity-only overload (a = 0).
FixedRankPoint retraction_curve(RetractionKind kind, const FixedRankPoint& x,
                                const TangentVector& v, double t);

/// Cubic retraction-Bezier Hermite interpolant: H(t) = R_{x0}(P(t)) where P
/// is the cubic Hermite polynomial in the inverse-retraction chart at x0,
/// evaluated by De Casteljau over the chart control vectors 0, (dt/3) v0,
/// w1 - (dt/3) u1, w1 with w1 = R^{-1}_{x0}(x1) and u1 = P(x0) v1. The
/// inverse orthographic retraction is linear in its argument, so the chart
/// transport is exact and H satisfies H(t0) = x0, H(t1) = x1,
/// Hdot(t0) = v0, Hdot(t1) = v1. On data sampled from a smooth curve the
/// interval error is O(dt^4).
///
/// `kind` must provide an inverse retraction; only ORTH qualifies. The query
/// t may lie outside [t0, t1] (extrapolation). Failures throw HermiteError
/// carrying the stage: 0 for the chart/control construction, 3 for the
/// final retraction.
FixedRankPoint hermite_eval(const HermiteData& data, RetractionKind kind, double t);

/// The unique cubic polynomial curve with H(ti) = Ai, H'(ti) = Vi.
Matrix euclidean_hermite_eval(double t0, const Matrix& a0, const Matrix& v0, double t1,
                              const Matrix& a1, const Matrix& v1, double t);

}  // namespace dlra
