#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dlra/errors.hpp"
#include "dlra/retractions.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace dlra;

namespace {

const std::vector<RetractionKind> kAllKinds = {RetractionKind::Svd, RetractionKind::Ksl,
                                               RetractionKind::Kls, RetractionKind::Orth};

std::vector<double> geometric_sv(Index r, double top, double ratio) {
  std::vector<double> sv(r);
  double v = top;
  for (Index i = 0; i < r; ++i, v *= ratio) sv[i] = v;
  return sv;
}

FixedRankPoint test_point(Index m, Index n, Index r, std::uint64_t seed) {
  return random_point({m, n, r}, geometric_sv(r, 1.0, 0.5), seed);
}

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return out;
}

double first_order_remainder(RetractionKind kind, const FixedRankPoint& x,
                             const TangentVector& z, double t) {
  return (embed(retract(kind, x, t * z)) - embed(x) - t * embed_tangent(x, z)).norm();
}

// Floor from the slope-fit design rule: 1e2 * eps * problem scale.
double fit_floor(const FixedRankPoint& x) {
  return 100.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, embed(x).norm());
}

}  // namespace

TEST_CASE("retraction axiom: R_X(0) = X for all kinds") {
  const FixedRankPoint x = test_point(7, 6, 3, 1);
  const TangentVector zero = TangentVector::zero(x.dims());
  for (RetractionKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    CHECK((embed(retract(kind, x, zero)) - embed(x)).norm() < 1e-13);
  }
}

TEST_CASE("first-order remainder decays like t^2 for all kinds") {
  const FixedRankPoint x = test_point(7, 6, 3, 2);
  const TangentVector z = random_tangent(x, 3, 1.0);
  const auto ts = logspace(1e-4, 1e-1, 7);
  for (RetractionKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    std::vector<double> errs;
    for (double t : ts) errs.push_back(first_order_remainder(kind, x, z, t));
    const SlopeFit fit = fit_loglog_slope(ts, errs, fit_floor(x));
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("second-order defect decays like t^3 for all kinds") {
  const FixedRankPoint x = test_point(8, 7, 2, 4);
  const TangentVector z = random_tangent(x, 5, 1.0);
  const auto ts = logspace(1e-3, 1e-1, 7);
  for (RetractionKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    std::vector<double> defects;
    for (double t : ts) defects.push_back(second_order_defect(kind, x, z, t));
    if (kind == RetractionKind::Orth) {
      // The orthographic remainder is normal at X by construction, so its
      // tangential part sits at the floating-point floor for every t.
      for (double d : defects) CHECK(d <= fit_floor(x));
    } else {
      const SlopeFit fit = fit_loglog_slope(ts, defects, fit_floor(x));
      CHECK(fit.slope >= 2.8);
    }
  }
  CHECK(second_order_defect(RetractionKind::Orth, x, TangentVector::zero(x.dims()), 0.1) <
        1e-13);
  CHECK_THROWS_AS(second_order_defect(RetractionKind::Orth, x, z, 0.0), ConfigError);
}

TEST_CASE("KSL, KLS and ORTH coincide up to O(t^3)") {
  const FixedRankPoint x = test_point(8, 7, 2, 6);
  const TangentVector z = random_tangent(x, 7, 1.0);
  const auto ts = logspace(1e-3, 1e-1, 7);

  const auto pair_slope = [&](RetractionKind a, RetractionKind b) {
    std::vector<double> diffs;
    for (double t : ts)
      diffs.push_back((embed(retract(a, x, t * z)) - embed(retract(b, x, t * z))).norm());
    return fit_loglog_slope(ts, diffs, fit_floor(x)).slope;
  };
  CHECK(pair_slope(RetractionKind::Ksl, RetractionKind::Orth) >= 2.8);
  CHECK(pair_slope(RetractionKind::Kls, RetractionKind::Orth) >= 2.8);
  CHECK(pair_slope(RetractionKind::Ksl, RetractionKind::Kls) >= 2.8);
}

TEST_CASE("SVD retraction equals the dense metric projection") {
  const FixedRankPoint x = test_point(7, 6, 2, 8);
  const TangentVector z = random_tangent(x, 9, 0.3);
  const FixedRankPoint fast = retract_svd(x, z);
  const FixedRankPoint dense = truncated_svd(embed(x) + embed_tangent(x, z), 2);
  CHECK((embed(fast) - embed(dense)).norm() < 1e-11);
}

TEST_CASE("extended SVD retraction consumes factored ambient steps") {
  const FixedRankPoint x = test_point(9, 8, 3, 10);
  // A non-tangent perturbation: a tangent vector at a different point.
  const FixedRankPoint other = test_point(9, 8, 2, 11);
  LowRankSum step = LowRankSum::zero(9, 8);
  step.add_tangent(other, random_tangent(other, 12, 1.0), 0.05);
  const FixedRankPoint fast = retract_svd(x, step);
  const FixedRankPoint dense = truncated_svd(embed(x) + step.dense(), 3);
  CHECK((embed(fast) - embed(dense)).norm() < 1e-11);
}

TEST_CASE("KLS sigma identity: step 5 equals U1^T (X + Z) V1") {
  const FixedRankPoint x = test_point(8, 6, 3, 13);
  const TangentVector z = random_tangent(x, 14, 0.4);
  const FixedRankPoint kls = detail::kls_core(x, z);
  const Matrix dense_sigma = kls.U.transpose() * (embed(x) + embed_tangent(x, z)) * kls.V;
  CHECK((kls.S - dense_sigma).norm() < 1e-12);
}

TEST_CASE("sigma difference between orthographic and KLS") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const FixedRankPoint x = test_point(8, 7, 2, 100 + seed);
    const TangentVector z = random_tangent(x, 200 + seed, 0.3);
    const FixedRankPoint kls = detail::kls_core(x, z);
    const FixedRankPoint orth = detail::orth_core(x, z);
    // Identical K-/L-step factors by construction.
    REQUIRE(kls.U == orth.U);
    REQUIRE(kls.V == orth.V);
    const Matrix s0m = x.S + z.M;
    const Matrix expected =
        kls.U.transpose() * z.Up * s0m.inverse() * z.Vp.transpose() * kls.V;
    CHECK((orth.S - kls.S - expected).norm() < 1e-12);
  }
}

TEST_CASE("orthographic residual lies in the normal space at X") {
  const FixedRankPoint x = test_point(8, 7, 3, 15);
  const TangentVector z = random_tangent(x, 16, 0.2);
  const FixedRankPoint y = retract_orth(x, z);
  const Matrix residual = embed(y) - embed(x) - embed_tangent(x, z);
  CHECK(tangent_norm(tangent_project(x, residual)) < 1e-11);
}

TEST_CASE("orthographic retraction rejects singular S + M") {
  const FixedRankPoint x = test_point(6, 5, 2, 17);
  TangentVector z = TangentVector::zero(x.dims());
  z.M = -x.S;  // S + M = 0
  CHECK_THROWS_AS(retract_orth(x, z), RetractionDomainError);
}

TEST_CASE("inverse orthographic retraction") {
  const FixedRankPoint x = test_point(8, 7, 3, 18);

  SUBCASE("at the base point") {
    CHECK(tangent_norm(inverse_retract_orth(x, x)) < 1e-13);
  }

  SUBCASE("roundtrip within the trust region") {
    const double sigma_r = smallest_singular_value(x);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const TangentVector z = random_tangent(x, 300 + seed, 0.1 * sigma_r);
      const FixedRankPoint y = retract_orth(x, z);
      const TangentVector back = inverse_retract_orth(x, y);
      CHECK(tangent_norm(back - z) < 1e-11);

      const FixedRankPoint forward = retract_orth(x, back);
      CHECK((embed(forward) - embed(y)).norm() < 1e-11);
    }
  }
}

TEST_CASE("retraction outputs satisfy the point invariants") {
  const FixedRankPoint x = test_point(9, 8, 3, 19);
  const TangentVector z = random_tangent(x, 20, 0.25);
  for (RetractionKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    const FixedRankPoint y = retract(kind, x, z);
    CHECK(satisfies_point_invariants(y, 1e-11));
  }
  // KSL / KLS renormalize: S comes back diagonal and ordered.
  const FixedRankPoint ksl = retract_ksl(x, z);
  CHECK((ksl.S - Matrix(ksl.S.diagonal().asDiagonal())).norm() == 0.0);
  for (Index i = 0; i + 1 < ksl.rank(); ++i) CHECK(ksl.S(i, i) >= ksl.S(i + 1, i + 1));
}
