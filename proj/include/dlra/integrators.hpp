#pragma once

#include "dlra/curves.hpp"
#include "dlra/manifold.hpp"
#include "dlra/retractions.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dlra {

/// Possibly time-dependent ambient vector field F(t, A). `jvp` is the
/// directional derivative DF(A)[H]; `dt_part` is the partial time
/// derivative. Either may be absent; an absent capability means the
/// corresponding term is identically zero.
struct VectorField {
  std::function<Matrix(double, const Matrix&)> eval;
  std::function<Matrix(double, const Matrix&, const Matrix&)> jvp;
  std::function<Matrix(double, const Matrix&)> dt_part;

  bool has_jvp() const { return static_cast<bool>(jvp); }
  bool has_dt_part() const { return static_cast<bool>(dt_part); }
};

enum class StepperKind { Prk1, Prk2, Prk3, Ksl, Kls, Afe, Rh, Arh };

std::string to_string(StepperKind kind);
StepperKind stepper_from_string(const std::string& name);
std::vector<StepperKind> all_steppers();

/// P(Y) F(t, Y): the projected vector field of the DLRA equation.
TangentVector projected_field(const VectorField& field, double t, const FixedRankPoint& y);

/// Intrinsic acceleration of the DLRA solution curve through y:
///   P(Y)( DF(Y)[P(Y)F(Y)] + dF/dt ) + W_Y( P(Y)F(Y), P(Y)^perp F(Y) ).
/// Requires at least one of jvp / dt_part.
TangentVector dlra_acceleration(const VectorField& field, double t, const FixedRankPoint& y);

/// One step of the s-stage projected Runge-Kutta method (s in {1,2,3}).
/// Stage combinations are carried as factored sums and retracted with the
/// extended SVD retraction. PRK1 is the projected forward Euler method.
FixedRankPoint step_prk(int stages, const VectorField& field, double t,
                        const FixedRankPoint& y, double dt);

FixedRankPoint step_ksl(const VectorField& field, double t, const FixedRankPoint& y, double dt);
FixedRankPoint step_kls(const VectorField& field, double t, const FixedRankPoint& y, double dt);

/// Accelerated forward Euler: retract dt * v + dt^2/2 * a with a
/// second-order retraction (default: orthographic).
FixedRankPoint step_afe(const VectorField& field, double t, const FixedRankPoint& y, double dt,
                        RetractionKind second_order_kind = RetractionKind::Orth);

/// Ralston-Hermite: an orthographic step to t + (2/3) dt followed by
/// Hermite extrapolation of the two jets to t + dt.
FixedRankPoint step_rh(const VectorField& field, double t, const FixedRankPoint& y, double dt);

/// Accelerated Ralston-Hermite: as RH but the intermediate point is an AFE
/// update with step (2/3) dt.
FixedRankPoint step_arh(const VectorField& field, double t, const FixedRankPoint& y, double dt);

/// One step of any scheme.
FixedRankPoint step(StepperKind kind, const VectorField& field, double t,
                    const FixedRankPoint& y, double dt);

struct StepDiagnostics {
  double time = 0.0;
  double sigma_r = 0.0;        // smallest singular value after the step
  double modeling_err = 0.0;   // normal component of F at the new state
  double wall_ms = 0.0;
  bool gap_warning = false;
};

struct StepFailure {
  int step_index = 0;
  double time = 0.0;
  std::string reason;
};

/// Discrete trajectory with per-step diagnostics. On failure the trajectory
/// holds the states computed so far plus the failure record.
struct Trajectory {
  std::vector<double> times;
  std::vector<FixedRankPoint> states;
  std::vector<StepDiagnostics> diagnostics;
  std::optional<StepFailure> failure;

  bool ok() const { return !failure.has_value(); }
  const FixedRankPoint& final_state() const { return states.back(); }
  double min_sigma_r() const;
};

/// Integrates with N = round(T / dt) uniform steps (T / dt must be integral
/// to 1e-9 relative); renormalizes after every step.
Trajectory integrate(StepperKind kind, const VectorField& field, const FixedRankPoint& y0,
                     double T, double dt);

/// Reference solution of the ambient equation A' = F(t, A) by an embedded
/// Dormand-Prince 5(4) pair with absolute and relative tolerance `tol`.
Matrix reference_ambient_solve(const VectorField& field, const Matrix& a0, double T,
                               double tol = 1e-10);

/// Reference states at the requested times (strictly increasing, starting
/// at times[0] >= 0; integration starts from A(0) = a0).
std::vector<Matrix> reference_ambient_path(const VectorField& field, const Matrix& a0,
                                           const std::vector<double>& times, double tol = 1e-10);

}  // namespace dlra
