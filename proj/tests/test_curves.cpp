#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dlra/curves.hpp"
#include "dlra/errors.hpp"
#include "dlra/problems.hpp"

#include <cmath>
#include <vector>

using namespace dlra;

namespace {

std::vector<double> geometric_sv(Index r, double top, double ratio) {
  std::vector<double> sv(r);
  double v = top;
  for (Index i = 0; i < r; ++i, v *= ratio) sv[i] = v;
  return sv;
}

// Rank-r rotation curve (trailing diagonal entries zeroed) and its jets;
// A'(t) is automatically tangent at A(t) since the curve stays on the
// manifold.
struct RankRCurve {
  RotationProblem p;
  Vector d;
  Index r;

  RankRCurve(Index n, Index rank, std::uint64_t seed) : p(make_rotation(n, seed)), r(rank) {
    d = Vector::Zero(n);
    for (Index i = 0; i < r; ++i) d(i) = std::pow(2.0, -static_cast<double>(i + 1));
  }

  Matrix value(double t) const { return rotation_curve(p.omega_u, p.omega_v, d, t).value; }

  JetData jet(double t) const {
    const CurveSample s = rotation_curve(p.omega_u, p.omega_v, d, t);
    JetData jet;
    jet.t = t;
    jet.x = truncated_svd(s.value, r);
    jet.v = tangent_project(jet.x, s.first);
    return jet;
  }
};

Matrix fd_velocity(const HermiteData& data, double t, double h) {
  return (embed(hermite_eval(data, RetractionKind::Orth, t + h)) -
          embed(hermite_eval(data, RetractionKind::Orth, t - h))) /
         (2.0 * h);
}

}  // namespace

TEST_CASE("retraction_curve: value, velocity and acceleration at 0") {
  const FixedRankPoint x = random_point({8, 7, 3}, geometric_sv(3, 1.0, 0.5), 1);
  const TangentVector v = random_tangent(x, 2, 1.0);
  const TangentVector a = random_tangent(x, 3, 0.8);

  CHECK((embed(retraction_curve(RetractionKind::Orth, x, v, a, 0.0)) - embed(x)).norm() <
        1e-13);

  for (RetractionKind kind : {RetractionKind::Svd, RetractionKind::Orth}) {
    CAPTURE(to_string(kind));
    const double h = 1e-6;
    const Matrix vel_fd = (embed(retraction_curve(kind, x, v, a, h)) -
                           embed(retraction_curve(kind, x, v, a, -h))) /
                          (2.0 * h);
    CHECK((vel_fd - embed_tangent(x, v)).norm() / tangent_norm(v) < 1e-4);

    // Intrinsic acceleration: tangential part of the second difference.
    // Second differences divide the ~1e-15 evaluation noise by h^2, so a
    // larger step is needed than for the velocity.
    const double h2 = 1e-4;
    const Matrix acc_fd = (embed(retraction_curve(kind, x, v, a, h2)) - 2.0 * embed(x) +
                           embed(retraction_curve(kind, x, v, a, -h2))) /
                          (h2 * h2);
    const TangentVector acc_tan = tangent_project(x, acc_fd);
    CHECK(tangent_norm(acc_tan - a) / tangent_norm(a) < 1e-3);
  }
}

TEST_CASE("hermite_eval: constant data gives a constant curve") {
  const FixedRankPoint x = random_point({7, 6, 2}, geometric_sv(2, 1.0, 0.5), 4);
  HermiteData data;
  data.p0 = {0.0, x, TangentVector::zero(x.dims()), std::nullopt};
  data.p1 = {1.0, x, TangentVector::zero(x.dims()), std::nullopt};
  for (double t : {0.0, 0.3, 0.5, 1.0, 1.5, -0.25})
    CHECK((embed(hermite_eval(data, RetractionKind::Orth, t)) - embed(x)).norm() < 1e-12);
}

TEST_CASE("hermite_eval: endpoint positions and velocities") {
  const RankRCurve curve(20, 4, 99);
  const double t0 = 0.1, dt = 0.2;
  HermiteData data{curve.jet(t0), curve.jet(t0 + dt)};

  CHECK((embed(hermite_eval(data, RetractionKind::Orth, t0)) - embed(data.p0.x)).norm() <
        1e-11);
  CHECK((embed(hermite_eval(data, RetractionKind::Orth, t0 + dt)) - embed(data.p1.x)).norm() <
        1e-11);

  const double h = 1e-6;
  const Matrix v0 = embed_tangent(data.p0.x, data.p0.v);
  const Matrix v1 = embed_tangent(data.p1.x, data.p1.v);
  CHECK((fd_velocity(data, t0, h) - v0).norm() / v0.norm() < 1e-4);
  CHECK((fd_velocity(data, t0 + dt, h) - v1).norm() / v1.norm() < 1e-4);
}

TEST_CASE("hermite_eval: O(dt^4) approximation of a smooth rank-r curve") {
  const RankRCurve curve(20, 4, 99);
  const double t0 = 0.1;
  std::vector<double> dts, errs;
  for (double dt : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
    HermiteData data{curve.jet(t0), curve.jet(t0 + dt)};
    double max_err = 0.0;
    for (int k = 0; k <= 10; ++k) {
      const double t = t0 + dt * k / 10.0;
      max_err = std::max(
          max_err, (embed(hermite_eval(data, RetractionKind::Orth, t)) - curve.value(t)).norm());
    }
    dts.push_back(dt);
    errs.push_back(max_err);
  }
  const SlopeFit fit = fit_loglog_slope(dts, errs);
  CHECK(fit.slope == doctest::Approx(4.0).epsilon(0.075));
}

TEST_CASE("hermite_eval on flat data reduces to the Euclidean cubic Hermite") {
  // All data share the U, V factors; the manifold is flat along U M V^T.
  const FixedRankPoint base = random_point({9, 7, 3}, geometric_sv(3, 1.0, 0.6), 7);
  Rng rng(8);
  const Matrix s0 = base.S;
  const Matrix s1 = base.S + 0.4 * rng.gaussian(3, 3);
  const Matrix g0 = rng.gaussian(3, 3);
  const Matrix g1 = rng.gaussian(3, 3);

  auto flat_point = [&](const Matrix& s) {
    FixedRankPoint y = base;
    y.S = s;
    return y;
  };
  auto flat_tangent = [&](const Matrix& m) {
    TangentVector t = TangentVector::zero(base.dims());
    t.M = m;
    return t;
  };

  HermiteData data;
  data.p0 = {0.25, flat_point(s0), flat_tangent(g0), std::nullopt};
  data.p1 = {0.75, flat_point(s1), flat_tangent(g1), std::nullopt};

  for (double t : {0.25, 0.4, 0.6, 0.75, 1.0}) {
    const Matrix s_interp = euclidean_hermite_eval(0.25, s0, g0, 0.75, s1, g1, t);
    const FixedRankPoint h = hermite_eval(data, RetractionKind::Orth, t);
    CHECK((embed(h) - base.U * s_interp * base.V.transpose()).norm() < 1e-10);
  }
}

TEST_CASE("hermite_eval is invariant under time shifts") {
  const RankRCurve curve(16, 3, 55);
  HermiteData data{curve.jet(0.1), curve.jet(0.35)};
  HermiteData shifted = data;
  const double shift = 17.5;
  shifted.p0.t += shift;
  shifted.p1.t += shift;
  for (double t : {0.1, 0.2, 0.35, 0.45}) {
    const Matrix a = embed(hermite_eval(data, RetractionKind::Orth, t));
    const Matrix b = embed(hermite_eval(shifted, RetractionKind::Orth, t + shift));
    CHECK((a - b).norm() < 1e-12);
  }
}

TEST_CASE("hermite_eval input validation and failure reporting") {
  const RankRCurve curve(10, 2, 3);
  HermiteData data{curve.jet(0.0), curve.jet(0.2)};

  CHECK_THROWS_AS(hermite_eval(data, RetractionKind::Svd, 0.1), CapabilityError);

  HermiteData bad = data;
  std::swap(bad.p0, bad.p1);
  CHECK_THROWS_AS(hermite_eval(bad, RetractionKind::Orth, 0.1), ConfigError);

  // A velocity large enough to push the final retraction out of its domain
  // reports the failing stage.
  HermiteData wild = data;
  wild.p0.v = random_tangent(wild.p0.x, 1, 1e4);
  try {
    hermite_eval(wild, RetractionKind::Orth, 0.1);
    // Some draws stay retractable; only the error type is pinned when not.
  } catch (const HermiteError& e) {
    CHECK(e.level() == 3);
  }
}

TEST_CASE("euclidean_hermite_eval: interpolation and degenerate input") {
  Rng rng(9);
  const Matrix a0 = rng.gaussian(4, 3), v0 = rng.gaussian(4, 3);
  const Matrix a1 = rng.gaussian(4, 3), v1 = rng.gaussian(4, 3);
  CHECK((euclidean_hermite_eval(0.2, a0, v0, 0.9, a1, v1, 0.2) - a0).norm() < 1e-13);
  CHECK((euclidean_hermite_eval(0.2, a0, v0, 0.9, a1, v1, 0.9) - a1).norm() < 1e-13);
  CHECK_THROWS_AS(euclidean_hermite_eval(0.5, a0, v0, 0.5, a1, v1, 0.5), ConfigError);
}

TEST_CASE("euclidean_hermite_eval reproduces the two-step extrapolation formula") {
  Rng rng(10);
  const Matrix a0 = rng.gaussian(5, 4), f0 = rng.gaussian(5, 4);
  const Matrix a1 = rng.gaussian(5, 4), f1 = rng.gaussian(5, 4);
  const double t0 = 0.3, dt = 0.45, t1 = t0 + dt;
  const Matrix lhs = euclidean_hermite_eval(t0, a0, f0, t1, a1, f1, t1 + dt);
  const Matrix rhs = 5.0 * a0 - 4.0 * a1 + dt * (2.0 * f0 + 4.0 * f1);
  CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
}

TEST_CASE("one Euler-then-Hermite step is the Ralston update for alpha = 2/3") {
  // Linear test field F(A) = L A with a fixed random L.
  Rng rng(11);
  const Matrix l = rng.gaussian(4, 4);
  const auto field = [&](const Matrix& a) { return Matrix(l * a); };

  const Matrix a0 = rng.gaussian(4, 4);
  const double t0 = 0.0, dt = 0.37, alpha = 2.0 / 3.0;

  const Matrix f0 = field(a0);
  const Matrix a_mid = a0 + alpha * dt * f0;
  const Matrix f_mid = field(a_mid);

  const Matrix via_hermite =
      euclidean_hermite_eval(t0, a0, f0, t0 + alpha * dt, a_mid, f_mid, t0 + dt);
  const Matrix ralston = a0 + dt * (0.25 * f0 + 0.75 * f_mid);
  CHECK((via_hermite - ralston).norm() < 1e-12 * ralston.norm());
}
