#include "dlra/integrators.hpp"

#include "dlra/errors.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

namespace dlra {

std::string to_string(StepperKind kind) {
  switch (kind) {
    case StepperKind::Prk1: return "PRK1";
    case StepperKind::Prk2: return "PRK2";
    case StepperKind::Prk3: return "PRK3";
    case StepperKind::Ksl: return "KSL";
    case StepperKind::Kls: return "KLS";
    case StepperKind::Afe: return "AFE";
    case StepperKind::Rh: return "RH";
    case StepperKind::Arh: return "ARH";
  }
  return "?";
}

StepperKind stepper_from_string(const std::string& name) {
  for (StepperKind k : all_steppers())
    if (to_string(k) == name) return k;
  throw ConfigError("unknown method: " + name);
}

std::vector<StepperKind> all_steppers() {
  return {StepperKind::Prk1, StepperKind::Prk2, StepperKind::Prk3, StepperKind::Ksl,
          StepperKind::Kls,  StepperKind::Afe,  StepperKind::Rh,   StepperKind::Arh};
}

TangentVector projected_field(const VectorField& field, double t, const FixedRankPoint& y) {
  if (!field.eval) throw CapabilityError("projected_field: field has no eval");
  return tangent_project(y, field.eval(t, embed(y)));
}

TangentVector dlra_acceleration(const VectorField& field, double t, const FixedRankPoint& y) {
  if (!field.has_jvp() && !field.has_dt_part())
    throw CapabilityError("dlra_acceleration: field provides neither jvp nor dt_part");

  const Matrix y_dense = embed(y);
  const Matrix f_val = field.eval(t, y_dense);
  const TangentVector v = tangent_project(y, f_val);
  const Matrix f_normal = f_val - embed_tangent(y, v);

  Matrix ambient = Matrix::Zero(y.rows(), y.cols());
  if (field.has_jvp()) ambient += field.jvp(t, y_dense, embed_tangent(y, v));
  if (field.has_dt_part()) ambient += field.dt_part(t, y_dense);

  return tangent_project(y, ambient) + weingarten(y, v, f_normal);
}

namespace {

// Explicit Butcher tables; PRK2 is Heun, PRK3 is Kutta's third-order rule.
struct ButcherTable {
  int stages;
  std::array<double, 3> c;
  std::array<std::array<double, 3>, 3> a;
  std::array<double, 3> b;
};

const ButcherTable& butcher(int stages) {
  static const ButcherTable prk1{1, {0.0, 0.0, 0.0}, {{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
                                 {1.0, 0.0, 0.0}};
  static const ButcherTable prk2{2, {0.0, 1.0, 0.0}, {{{0, 0, 0}, {1.0, 0, 0}, {0, 0, 0}}},
                                 {0.5, 0.5, 0.0}};
  static const ButcherTable prk3{
      3,
      {0.0, 0.5, 1.0},
      {{{0, 0, 0}, {0.5, 0, 0}, {-1.0, 2.0, 0}}},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}};
  switch (stages) {
    case 1: return prk1;
    case 2: return prk2;
    case 3: return prk3;
    default: throw ConfigError("step_prk: stages must be 1, 2 or 3");
  }
}

}  // namespace

FixedRankPoint step_prk(int stages, const VectorField& field, double t,
                        const FixedRankPoint& y, double dt) {
  const ButcherTable& tab = butcher(stages);

  std::vector<FixedRankPoint> eta;
  std::vector<TangentVector> k;
  eta.reserve(tab.stages);
  k.reserve(tab.stages);

  for (int i = 0; i < tab.stages; ++i) {
    if (i == 0) {
      eta.push_back(y);
    } else {
      LowRankSum sum = LowRankSum::of_point(y);
      for (int j = 0; j < i; ++j)
        if (tab.a[i][j] != 0.0) sum.add_tangent(eta[j], k[j], dt * tab.a[i][j]);
      eta.push_back(truncated_svd(sum, y.rank()));
    }
    k.push_back(projected_field(field, t + tab.c[i] * dt, eta[i]));
  }

  LowRankSum sum = LowRankSum::of_point(y);
  for (int i = 0; i < tab.stages; ++i)
    if (tab.b[i] != 0.0) sum.add_tangent(eta[i], k[i], dt * tab.b[i]);
  return truncated_svd(sum, y.rank());
}

FixedRankPoint step_ksl(const VectorField& field, double t, const FixedRankPoint& y, double dt) {
  return retract_ksl(y, dt * projected_field(field, t, y));
}

FixedRankPoint step_kls(const VectorField& field, double t, const FixedRankPoint& y, double dt) {
  return retract_kls(y, dt * projected_field(field, t, y));
}

FixedRankPoint step_afe(const VectorField& field, double t, const FixedRankPoint& y, double dt,
                        RetractionKind second_order_kind) {
  const TangentVector v = projected_field(field, t, y);
  const TangentVector a = dlra_acceleration(field, t, y);
  return retract(second_order_kind, y, dt * v + (0.5 * dt * dt) * a);
}

namespace {

FixedRankPoint hermite_step(const VectorField& field, double t, const FixedRankPoint& y,
                            const TangentVector& v, double dt,
                            const FixedRankPoint& y_mid) {
  const double t_mid = t + (2.0 / 3.0) * dt;
  HermiteData data;
  data.p0 = {t, y, v, std::nullopt};
  data.p1 = {t_mid, y_mid, projected_field(field, t_mid, y_mid), std::nullopt};
  return hermite_eval(data, RetractionKind::Orth, t + dt);
}

}  // namespace

FixedRankPoint step_rh(const VectorField& field, double t, const FixedRankPoint& y, double dt) {
  const TangentVector v = projected_field(field, t, y);
  const FixedRankPoint y_mid = retract_orth(y, ((2.0 / 3.0) * dt) * v);
  return hermite_step(field, t, y, v, dt, y_mid);
}

FixedRankPoint step_arh(const VectorField& field, double t, const FixedRankPoint& y, double dt) {
  const TangentVector v = projected_field(field, t, y);
  const FixedRankPoint y_mid = step_afe(field, t, y, (2.0 / 3.0) * dt, RetractionKind::Orth);
  return hermite_step(field, t, y, v, dt, y_mid);
}

FixedRankPoint step(StepperKind kind, const VectorField& field, double t,
                    const FixedRankPoint& y, double dt) {
  switch (kind) {
    case StepperKind::Prk1: return step_prk(1, field, t, y, dt);
    case StepperKind::Prk2: return step_prk(2, field, t, y, dt);
    case StepperKind::Prk3: return step_prk(3, field, t, y, dt);
    case StepperKind::Ksl: return step_ksl(field, t, y, dt);
    case StepperKind::Kls: return step_kls(field, t, y, dt);
    case StepperKind::Afe: return step_afe(field, t, y, dt);
    case StepperKind::Rh: return step_rh(field, t, y, dt);
    case StepperKind::Arh: return step_arh(field, t, y, dt);
  }
  throw ConfigError("step: unknown kind");
}

double Trajectory::min_sigma_r() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& d : diagnostics) out = std::min(out, d.sigma_r);
  return out;
}

Trajectory integrate(StepperKind kind, const VectorField& field, const FixedRankPoint& y0,
                     double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw ConfigError("integrate: require T > 0 and dt > 0");
  const double ratio = T / dt;
  const auto n_steps = static_cast<long>(std::llround(ratio));
  if (n_steps < 1 || std::abs(ratio - static_cast<double>(n_steps)) > 1e-9)
    throw ConfigError("integrate: T / dt must be an integer");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(y0);

  for (long step_index = 0; step_index < n_steps; ++step_index) {
    const double t = static_cast<double>(step_index) * dt;
    const auto tic = std::chrono::steady_clock::now();
    FixedRankPoint next;
    try {
      next = renormalize(step(kind, field, t, traj.states.back(), dt));
    } catch (const Error& e) {
      traj.failure = StepFailure{static_cast<int>(step_index), t, e.what()};
      return traj;
    }
    const auto toc = std::chrono::steady_clock::now();

    const double t_next = static_cast<double>(step_index + 1) * dt;
    StepDiagnostics diag;
    diag.time = t_next;
    diag.sigma_r = next.S(next.rank() - 1, next.rank() - 1);
    diag.modeling_err = modeling_error(next, field.eval(t_next, embed(next)));
    diag.wall_ms = std::chrono::duration<double, std::milli>(toc - tic).count();
    diag.gap_warning = next.gap_warning;

    traj.times.push_back(t_next);
    traj.states.push_back(std::move(next));
    traj.diagnostics.push_back(diag);
  }
  return traj;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct DopriState {
  Matrix y;
  Matrix k1;  // FSAL slope at y
};

// One accepted-or-rejected attempt; returns the scaled error norm.
double dopri_attempt(const VectorField& f, double t, const DopriState& s, double h,
                     Matrix& y_new, Matrix& k_new, double tol) {
  const Matrix& y = s.y;
  const Matrix k2 = f.eval(t + c2 * h, y + h * (a21 * s.k1));
  const Matrix k3 = f.eval(t + c3 * h, y + h * (a31 * s.k1 + a32 * k2));
  const Matrix k4 = f.eval(t + c4 * h, y + h * (a41 * s.k1 + a42 * k2 + a43 * k3));
  const Matrix k5 = f.eval(t + c5 * h, y + h * (a51 * s.k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Matrix k6 =
      f.eval(t + h, y + h * (a61 * s.k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  y_new = y + h * (b1 * s.k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  k_new = f.eval(t + h, y_new);
  const Matrix err = h * (e1 * s.k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k_new);

  double norm2 = 0.0;
  for (Index i = 0; i < err.rows(); ++i)
    for (Index j = 0; j < err.cols(); ++j) {
      const double scale = tol + tol * std::max(std::abs(y(i, j)), std::abs(y_new(i, j)));
      const double q = err(i, j) / scale;
      norm2 += q * q;
    }
  return std::sqrt(norm2 / static_cast<double>(err.size()));
}

// Integrates from t_from to t_to, updating the FSAL state in place.
void dopri_advance(const VectorField& f, double& t, DopriState& s, double t_to, double tol) {
  if (!(tol > 0.0)) throw ConfigError("reference_ambient_solve: tol must be positive");
  const double span = t_to - t;
  if (span <= 0.0) return;
  double h = span / 16.0;
  const double h_min = 1e-14 * std::max(1.0, std::abs(t_to));

  while (t < t_to) {
    h = std::min(h, t_to - t);
    if (h < h_min)
      throw Error("reference_ambient_solve: step size underflow");
    Matrix y_new, k_new;
    const double err = dopri_attempt(f, t, s, h, y_new, k_new, tol);
    if (err <= 1.0) {
      t += h;
      s.y = std::move(y_new);
      s.k1 = std::move(k_new);
    }
    const double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
}

}  // namespace

Matrix reference_ambient_solve(const VectorField& field, const Matrix& a0, double T,
                               double tol) {
  DopriState s{a0, field.eval(0.0, a0)};
  double t = 0.0;
  dopri_advance(field, t, s, T, tol);
  return s.y;
}

std::vector<Matrix> reference_ambient_path(const VectorField& field, const Matrix& a0,
                                           const std::vector<double>& times, double tol) {
  std::vector<Matrix> out;
  out.reserve(times.size());
  DopriState s{a0, field.eval(0.0, a0)};
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw ConfigError("reference_ambient_path: times must be nondecreasing");
    dopri_advance(field, t, s, target, tol);
    out.push_back(s.y);
  }
  return out;
}

}  // namespace dlra
