#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dlra/errors.hpp"
#include "dlra/integrators.hpp"
#include "dlra/problems.hpp"

#include <Eigen/SVD>

#include <cmath>

using namespace dlra;

namespace {

Matrix dense_laplacian(Index n) {
  Matrix l = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    l(i, i) = -2.0;
    if (i > 0) l(i, i - 1) = 1.0;
    if (i + 1 < n) l(i, i + 1) = 1.0;
  }
  return l;
}

}  // namespace

TEST_CASE("make_lyapunov: prescribed singular values and source norm") {
  const LyapunovProblem p = make_lyapunov(100, 12, 1.0, 5);
  const Vector sv = Eigen::BDCSVD<Matrix>(p.A0).singularValues();
  CHECK(sv(0) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(sv(11) == doctest::Approx(std::pow(3.0, -10.0)).epsilon(1e-8));
  CHECK(sv(12) < 1e-12);  // rank exactly r
  CHECK(p.Q.norm() == doctest::Approx(1.0).epsilon(1e-12));

  const LyapunovProblem p0 = make_lyapunov(50, 5, 0.0, 5);
  CHECK(p0.Q.norm() == 0.0);

  const LyapunovProblem p2 = make_lyapunov(50, 5, 0.3, 5);
  CHECK(p2.Q.norm() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("laplacian application matches the dense operator") {
  Rng rng(6);
  const Matrix a = rng.gaussian(20, 20);
  const Matrix l = dense_laplacian(20);
  CHECK((apply_laplacian_left(a) - l * a).norm() < 1e-12);
  CHECK((apply_laplacian_right(a) - a * l.transpose()).norm() < 1e-12);
}

TEST_CASE("lyapunov_field: oracle, jvp linearity, capabilities") {
  const LyapunovProblem p = make_lyapunov(20, 3, 0.5, 7);
  const VectorField f = lyapunov_field(p);
  Rng rng(8);
  const Matrix a = rng.gaussian(20, 20);
  const Matrix l = dense_laplacian(20);
  CHECK((f.eval(0.0, a) - (l * a + a * l.transpose() + p.Q)).norm() < 1e-12);

  CHECK(f.eval(0.0, Matrix::Zero(20, 20)).norm() ==
        doctest::Approx(p.Q.norm()).epsilon(1e-14));
  const LyapunovProblem p0 = make_lyapunov(20, 3, 0.0, 7);
  CHECK(lyapunov_field(p0).eval(0.0, Matrix::Zero(20, 20)).norm() == 0.0);

  const Matrix h1 = rng.gaussian(20, 20), h2 = rng.gaussian(20, 20);
  const Matrix lin = f.jvp(0.0, a, 2.0 * h1 - 0.5 * h2);
  const Matrix split = 2.0 * f.jvp(0.0, a, h1) - 0.5 * f.jvp(0.0, a, h2);
  CHECK((lin - split).norm() < 1e-12 * split.norm());

  CHECK(f.has_jvp());
  CHECK_FALSE(f.has_dt_part());  // autonomous
}

TEST_CASE("make_rotation: skew factors, halving diagonal, determinism") {
  const RotationProblem p = make_rotation(30, 11);
  CHECK((p.omega_u + p.omega_u.transpose()).norm() < 1e-14);
  CHECK((p.omega_v + p.omega_v.transpose()).norm() < 1e-14);
  for (Index i = 0; i < 30; ++i)
    CHECK(p.d(i) == doctest::Approx(std::pow(2.0, -double(i + 1))).epsilon(1e-15));
  for (Index i = 0; i + 1 < 30; ++i) CHECK(p.d(i + 1) == doctest::Approx(p.d(i) / 2.0));

  const RotationProblem q = make_rotation(30, 11);
  CHECK(p.omega_u == q.omega_u);
  CHECK(p.omega_v == q.omega_v);
}

TEST_CASE("rotation_curve: value and derivatives") {
  const RotationProblem p = make_rotation(12, 13);

  SUBCASE("t = 0 closed form") {
    const CurveSample s = rotation_curve(p, 0.0);
    CHECK((s.value - Matrix(p.d.asDiagonal())).norm() < 1e-13);
    const Matrix d = p.d.asDiagonal();
    const Matrix expected = p.omega_u * d + d + d * p.omega_v.transpose();
    CHECK((s.first - expected).norm() < 1e-13);
  }

  SUBCASE("A' and A'' match finite differences of A") {
    const double t = 0.3;
    const CurveSample s = rotation_curve(p, t);
    const double h = 1e-6;
    const Matrix plus = rotation_curve(p, t + h).value;
    const Matrix minus = rotation_curve(p, t - h).value;
    CHECK(((plus - minus) / (2.0 * h) - s.first).norm() / s.first.norm() < 1e-6);

    const double h2 = 1e-4;
    const Matrix plus2 = rotation_curve(p, t + h2).value;
    const Matrix minus2 = rotation_curve(p, t - h2).value;
    const Matrix acc_fd = (plus2 - 2.0 * s.value + minus2) / (h2 * h2);
    CHECK((acc_fd - s.second).norm() / s.second.norm() < 1e-4);
  }
}

TEST_CASE("rotation_field delegates to the curve") {
  const RotationProblem p = make_rotation(10, 17);
  const VectorField f = rotation_field(p);
  const Matrix ignored = Matrix::Zero(10, 10);
  for (double t : {0.0, 0.2, 0.7}) {
    const CurveSample s = rotation_curve(p, t);
    CHECK((f.eval(t, ignored) - s.first).norm() == 0.0);      // memoized, exact reuse
    CHECK((f.dt_part(t, ignored) - s.second).norm() == 0.0);
  }
  CHECK_FALSE(f.has_jvp());  // F is state-independent
  CHECK(f.has_dt_part());
}

TEST_CASE("matrix_exponential: identity, inverse, 2x2 rotation, orthogonality") {
  CHECK((matrix_exponential(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)).norm() < 1e-14);

  Rng rng(19);
  const Matrix g = rng.gaussian(8, 8);
  const Matrix omega = 0.5 * (g - g.transpose());
  CHECK((matrix_exponential(omega, 0.0) - Matrix::Identity(8, 8)).norm() < 1e-14);

  const Matrix e = matrix_exponential(omega, 0.7);
  const Matrix e_inv = matrix_exponential(omega, -0.7);
  CHECK((e * e_inv - Matrix::Identity(8, 8)).norm() < 1e-12);
  CHECK((e.transpose() * e - Matrix::Identity(8, 8)).norm() < 1e-12);

  const double theta = 0.83;
  Matrix skew(2, 2);
  skew << 0.0, -theta, theta, 0.0;
  Matrix rotation(2, 2);
  rotation << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  CHECK((matrix_exponential(skew) - rotation).norm() < 1e-13);

  CHECK_THROWS_AS(matrix_exponential(Matrix::Zero(3, 2)), ShapeError);
}

TEST_CASE("make_hermite_instance: spectra, norms, perturbation range, determinism") {
  const double sigma_r = 1e-3;
  const HermiteRobustnessInstance inst = make_hermite_instance(sigma_r, 23);

  CHECK(inst.y0.dims() == Dims{100, 100, 12});
  CHECK(inst.y0.S(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(inst.y0.S(11, 11) == doctest::Approx(sigma_r).epsilon(1e-14));
  CHECK(satisfies_point_invariants(inst.y0, 1e-11));
  CHECK(satisfies_point_invariants(inst.y1, 1e-11));

  CHECK(tangent_norm(inst.z0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tangent_norm(inst.z1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_tangent_at(inst.y0, inst.z0, 1e-11));
  CHECK(is_tangent_at(inst.y1, inst.z1, 1e-11));

  for (Index i = 0; i < 12; ++i) {
    const double ratio = inst.y1.S(i, i) / inst.y0.S(i, i) - 1.0;
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 2.0);
  }

  const HermiteRobustnessInstance again = make_hermite_instance(sigma_r, 23);
  CHECK(inst.y0.U == again.y0.U);
  CHECK(inst.y1.S == again.y1.S);

  CHECK_THROWS_AS(make_hermite_instance(0.0, 1), ConfigError);
  CHECK_THROWS_AS(make_hermite_instance(1.5, 1), ConfigError);
}

TEST_CASE("zero source keeps the exact Lyapunov solution at rank r") {
  // Desk-scale version of the rank-preservation property.
  const LyapunovProblem p = make_lyapunov(40, 5, 0.0, 29);
  const VectorField f = lyapunov_field(p);
  const Matrix a_t = reference_ambient_solve(f, p.A0, 0.5, 1e-10);
  const Vector sv = Eigen::BDCSVD<Matrix>(a_t).singularValues();
  CHECK(sv(5) / sv(0) <= 1e-8);
}
