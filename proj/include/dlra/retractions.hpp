#pragma once

#include "dlra/manifold.hpp"

#include <string>

namespace dlra {

/// The four fixed-rank retractions. All are second-order; only ORTH has an
/// implemented inverse and only SVD accepts extended (non-tangent) steps.
enum class RetractionKind { Svd, Ksl, Kls, Orth };

std::string to_string(RetractionKind kind);

/// Metric-projection retraction: the rank-r truncated SVD of X + Z,
/// computed from the 2r x 2r core (QR of Up and Vp, SVD of the core).
FixedRankPoint retract_svd(const FixedRankPoint& x, const TangentVector& z);

/// Extended SVD retraction: metric projection of X + Z where Z is a general
/// low-rank ambient perturbation (Runge-Kutta stage sums). `step` must NOT
/// already include X.
FixedRankPoint retract_svd(const FixedRankPoint& x, const LowRankSum& step);

/// Projector-splitting retraction with substep order K, S, L, followed by
/// renormalization.
FixedRankPoint retract_ksl(const FixedRankPoint& x, const TangentVector& z);

/// Projector-splitting retraction with substep order K, L, S (the
/// unconventional-integrator update), followed by renormalization.
FixedRankPoint retract_kls(const FixedRankPoint& x, const TangentVector& z);

/// Orthographic retraction: projects X + Z back onto the manifold along the
/// normal space at X. Throws RetractionDomainError when S + M is singular.
FixedRankPoint retract_orth(const FixedRankPoint& x, const TangentVector& z);

/// Dispatch on `kind` for tangent arguments.
FixedRankPoint retract(RetractionKind kind, const FixedRankPoint& x, const TangentVector& z);

/// Exact local inverse of the orthographic retraction: the tangent
/// projection of Y - X, computed in factored form (rank <= 2r).
TangentVector inverse_retract_orth(const FixedRankPoint& x, const FixedRankPoint& y);

/// || P_X( R_X(t Z) - X - t Z ) ||_F, the tangential part of the
/// second-order remainder. Decays like t^3 for second-order retractions.
double second_order_defect(RetractionKind kind, const FixedRankPoint& x,
                           const TangentVector& z, double t);

namespace detail {

/// Algorithm outputs before the optional diagonalization step; S is a
/// general r x r matrix. Both KLS and ORTH run the same K- and L-step QR
/// factorizations, so their U and V factors agree bitwise, which the
/// Sigma-difference identity tests rely on.
FixedRankPoint ksl_core(const FixedRankPoint& x, const TangentVector& z);
FixedRankPoint kls_core(const FixedRankPoint& x, const TangentVector& z);
FixedRankPoint orth_core(const FixedRankPoint& x, const TangentVector& z);

}  // namespace detail

}  // namespace dlra
