#pragma once

#include "dlra/integrators.hpp"
#include "dlra/manifold.hpp"

namespace dlra {

/// Differential Lyapunov equation A' = L A + A L^T + Q where L is the
/// tridiagonal 1D Laplace stencil (-2 on the diagonal, 1 off-diagonal).
/// Q has Frobenius norm eta (zero matrix when eta = 0); A0 has rank
/// exactly r with singular values 3^{2-i}.
struct LyapunovProblem {
  Index n = 0;
  Index r = 0;
  double eta = 0.0;
  Matrix Q;
  Matrix A0;
};

LyapunovProblem make_lyapunov(Index n, Index r, double eta, std::uint64_t seed);

/// L A with L the Laplace stencil, applied row-wise (never densifying L).
Matrix apply_laplacian_left(const Matrix& a);
/// A L^T, applied column-wise.
Matrix apply_laplacian_right(const Matrix& a);

/// Vector field of the Lyapunov equation; jvp(H) = L H + H L^T, autonomous
/// (no dt_part).
VectorField lyapunov_field(const LyapunovProblem& p);

/// Rotation test curve A(t) = exp(t Wu) (e^t D) exp(t Wv)^T with
/// skew-symmetric Wu, Wv and diagonal D.
struct RotationProblem {
  Matrix omega_u;
  Matrix omega_v;
  Vector d;  // diagonal of D
};

/// Seeded instance with Wu, Wv = (G - G^T)/2 and D = diag(2^-1, ..., 2^-n).
RotationProblem make_rotation(Index n, std::uint64_t seed);

struct CurveSample {
  Matrix value;   // A(t)
  Matrix first;   // A'(t)
  Matrix second;  // A''(t)
};

/// A, A' and A'' of the rotation curve in closed form.
CurveSample rotation_curve(const RotationProblem& p, double t);
CurveSample rotation_curve(const Matrix& omega_u, const Matrix& omega_v, const Vector& d,
                           double t);

/// State-independent field F(t, .) = A'(t) with dt_part = A''(t) and no jvp
/// (F does not depend on the state). Exponentials are memoized per field
/// instance behind a mutex.
VectorField rotation_field(const RotationProblem& p);

/// Interpolation data for the Hermite fragility experiment: two nearby
/// rank-12 points of size 100 x 100 with prescribed singular value decay
/// and unit-norm tangent directions at each.
struct HermiteRobustnessInstance {
  FixedRankPoint y0;
  FixedRankPoint y1;
  TangentVector z0;  // at y0
  TangentVector z1;  // at y1
  double sigma_r = 0.0;
};

/// Builds an instance with sigma(Y0) logarithmically spaced on [sigma_r, 1];
/// Y1 is the orthographic image of a unit tangent step with singular values
/// replaced by sigma_i(Y0) (1 + xi_i), xi_i uniform on [1/2, 2]. Retraction
/// failures are resampled up to 10 times.
HermiteRobustnessInstance make_hermite_instance(double sigma_r, std::uint64_t seed);

/// e^{t Omega} by scaling-and-squaring with a Pade core.
Matrix matrix_exponential(const Matrix& omega, double t = 1.0);

}  // namespace dlra
