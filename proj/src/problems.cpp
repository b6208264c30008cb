#include "dlra/problems.hpp"

#include "dlra/errors.hpp"
#include "dlra/retractions.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace dlra {

namespace {

// Dense matrix with prescribed singular values and seeded orthonormal
// factors; `sv` may contain trailing zeros.
Matrix from_random_svd(Index n, const Vector& sv, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix u = thin_qr(rng.gaussian(n, n)).Q;
  const Matrix v = thin_qr(rng.gaussian(n, n)).Q;
  return u * sv.asDiagonal() * v.transpose();
}

}  // namespace

LyapunovProblem make_lyapunov(Index n, Index r, double eta, std::uint64_t seed) {
  validate({n, n, r});
  if (eta < 0.0) throw ConfigError("make_lyapunov: eta must be nonnegative");

  LyapunovProblem p;
  p.n = n;
  p.r = r;
  p.eta = eta;

  if (eta == 0.0) {
    p.Q = Matrix::Zero(n, n);
  } else {
    Vector sv(n);
    for (Index i = 0; i < n; ++i) sv(i) = std::pow(10.0, 2.0 - static_cast<double>(i + 1));
    const Matrix q_tilde = from_random_svd(n, sv, mix_seed(seed, {1}));
    p.Q = (eta / q_tilde.norm()) * q_tilde;
  }

  Vector sv0 = Vector::Zero(n);
  for (Index i = 0; i < r; ++i) sv0(i) = std::pow(3.0, 2.0 - static_cast<double>(i + 1));
  p.A0 = from_random_svd(n, sv0, mix_seed(seed, {2}));
  return p;
}

Matrix apply_laplacian_left(const Matrix& a) {
  const Index n = a.rows();
  Matrix out = -2.0 * a;
  out.topRows(n - 1) += a.bottomRows(n - 1);
  out.bottomRows(n - 1) += a.topRows(n - 1);
  return out;
}

Matrix apply_laplacian_right(const Matrix& a) {
  const Index n = a.cols();
  Matrix out = -2.0 * a;
  out.leftCols(n - 1) += a.rightCols(n - 1);
  out.rightCols(n - 1) += a.leftCols(n - 1);
  return out;
}

VectorField lyapunov_field(const LyapunovProblem& p) {
  VectorField f;
  const Matrix q = p.Q;
  f.eval = [q](double, const Matrix& a) {
    return apply_laplacian_left(a) + apply_laplacian_right(a) + q;
  };
  f.jvp = [](double, const Matrix&, const Matrix& h) {
    return apply_laplacian_left(h) + apply_laplacian_right(h);
  };
  return f;
}

RotationProblem make_rotation(Index n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("make_rotation: n must be positive");
  RotationProblem p;
  Rng rng(mix_seed(seed, {1}));
  const Matrix gu = rng.gaussian(n, n);
  p.omega_u = 0.5 * (gu - gu.transpose());
  Rng rng_v(mix_seed(seed, {2}));
  const Matrix gv = rng_v.gaussian(n, n);
  p.omega_v = 0.5 * (gv - gv.transpose());
  p.d = Vector(n);
  for (Index i = 0; i < n; ++i) p.d(i) = std::pow(2.0, -static_cast<double>(i + 1));
  return p;
}

CurveSample rotation_curve(const Matrix& omega_u, const Matrix& omega_v, const Vector& d,
                           double t) {
  const Matrix u = matrix_exponential(omega_u, t);
  const Matrix v = matrix_exponential(omega_v, t);
  const Matrix sigma = std::exp(t) * Matrix(d.asDiagonal());

  const Matrix b = omega_u * sigma + sigma + sigma * omega_v.transpose();
  const Matrix b2 = omega_u * omega_u * sigma + sigma +
                    sigma * (omega_v * omega_v).transpose() + 2.0 * omega_u * sigma +
                    2.0 * omega_u * sigma * omega_v.transpose() +
                    2.0 * sigma * omega_v.transpose();

  CurveSample s;
  s.value = u * sigma * v.transpose();
  s.first = u * b * v.transpose();
  s.second = u * b2 * v.transpose();
  return s;
}

CurveSample rotation_curve(const RotationProblem& p, double t) {
  return rotation_curve(p.omega_u, p.omega_v, p.d, t);
}

VectorField rotation_field(const RotationProblem& p) {
  struct Memo {
    std::mutex mutex;
    std::map<double, CurveSample> samples;
  };
  auto memo = std::make_shared<Memo>();
  auto problem = std::make_shared<RotationProblem>(p);

  auto sample_at = [memo, problem](double t) -> CurveSample {
    std::lock_guard<std::mutex> lock(memo->mutex);
    auto it = memo->samples.find(t);
    if (it == memo->samples.end())
      it = memo->samples.emplace(t, rotation_curve(*problem, t)).first;
    return it->second;
  };

  VectorField f;
  f.eval = [sample_at](double t, const Matrix&) { return sample_at(t).first; };
  f.dt_part = [sample_at](double t, const Matrix&) { return sample_at(t).second; };
  return f;
}

HermiteRobustnessInstance make_hermite_instance(double sigma_r, std::uint64_t seed) {
  if (!(sigma_r > 0.0) || sigma_r > 1.0)
    throw ConfigError("make_hermite_instance: require 0 < sigma_r <= 1");

  const Dims dims{100, 100, 12};
  std::vector<double> sv(dims.r);
  for (Index i = 0; i < dims.r; ++i)
    sv[i] = std::pow(sigma_r, static_cast<double>(i) / static_cast<double>(dims.r - 1));

  std::string last_failure = "no attempt";
  for (int attempt = 0; attempt < 10; ++attempt) {
    const auto path = [&](std::uint64_t stream) {
      return mix_seed(seed, {static_cast<std::uint64_t>(attempt), stream});
    };
    try {
      HermiteRobustnessInstance inst;
      inst.sigma_r = sigma_r;
      inst.y0 = random_point(dims, sv, path(0));

      const TangentVector z = random_tangent(inst.y0, path(1), 1.0);
      const FixedRankPoint y1_tilde = renormalize(retract_orth(inst.y0, z));

      Rng xi_rng(path(2));
      inst.y1 = y1_tilde;
      for (Index i = 0; i < dims.r; ++i)
        inst.y1.S(i, i) = sv[i] * (1.0 + xi_rng.uniform(0.5, 2.0));

      inst.z0 = random_tangent(inst.y0, path(3), 1.0);
      inst.z1 = random_tangent(inst.y1, path(4), 1.0);
      return inst;
    } catch (const Error& e) {
      last_failure = e.what();
    }
  }
  throw RetractionDomainError("make_hermite_instance: all resamples failed (" + last_failure +
                              ")");
}

Matrix matrix_exponential(const Matrix& omega, double t) {
  if (omega.rows() != omega.cols()) throw ShapeError("matrix_exponential: square input required");
  return Matrix(t * omega).exp();
}

}  // namespace dlra
