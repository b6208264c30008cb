#pragma once

#include "dlra/integrators.hpp"
#include "dlra/problems.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dlra {

/// Configuration of one experiment sweep. Defaults reproduce the paper-scale
/// setups (n = 100, r = 12, T = 0.5, dt = T / 2^k for k = 2..10).
struct SweepConfig {
  std::string experiment = "convergence";  // convergence | robustness |
                                           // hermite-robustness | order-check
  int n = 100;
  int r = 12;
  std::vector<int> ranks = {5, 10, 15, 20};         // robustness, order-check
  std::vector<double> etas = {0.0, 0.01, 0.1, 1.0};  // convergence
  double T = 0.5;
  std::vector<double> dts;             // empty: T / 2^k, k = 2..10
  std::vector<std::string> methods;    // empty: per-experiment default
  std::uint64_t seed = 0;
  double ref_tol = 1e-10;
  std::string out_dir = "out";
  int jobs = 1;
  std::vector<double> sigma_rs;  // hermite-robustness; empty: 1e-1 .. 1e-8
  int instances = 100;           // hermite-robustness
};

/// dt = T / 2^k for k = 2..10.
std::vector<double> default_dt_sweep(double T);

/// Fills empty dts / methods / sigma_rs with the experiment's defaults and
/// validates the configuration.
void apply_defaults(SweepConfig& config);

/// Flat key=value file ('#' starts a comment). Unknown keys are rejected.
SweepConfig parse_config_file(const std::string& path);

/// One sweep cell: a (method, step size, rank, eta) integration outcome.
struct SweepRow {
  std::string experiment;
  std::string method;
  int n = 0;
  int r = 0;
  double eta = 0.0;
  double dt = 0.0;
  double final_error = 0.0;       // || Y(T) - A_ref(T) ||_2
  double best_approx_error = 0.0; // || A_ref(T) - P_Mr A_ref(T) ||_2
  double min_sigma_r = 0.0;
  double wall_time_ms = 0.0;
  bool failed = false;
  std::string failure_reason;
};

struct OrderEstimate {
  std::string method;
  int r = 0;
  double eta = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double dt_min = 0.0;   // window actually used
  double dt_max = 0.0;
  int points = 0;
  double plateau = 0.0;
};

/// Singular values of the reference solution at sampled times (one block
/// per eta; `sigmas` is times x count).
struct SvHistory {
  double eta = 0.0;
  std::vector<double> times;
  Matrix sigmas;
};

struct HermiteRow {
  double sigma_r = 0.0;
  int instance = 0;
  double err_v0 = 0.0;  // || Z0 - Hdot(0) ||_F
  double err_v1 = 0.0;  // || Z1 - Hdot(1) ||_F
  bool failed = false;
  std::string failure_reason;
};

/// Velocity-error percentiles {5, 25, 50, 75, 95} at one (sigma_r, tau).
struct HermitePercentiles {
  double sigma_r = 0.0;
  int tau = 0;  // 0 or 1
  double p05 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0;
  int samples = 0;
  int failures = 0;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;
  std::vector<OrderEstimate> orders;
  std::vector<SvHistory> histories;
  std::vector<HermiteRow> hermite_rows;
  std::vector<HermitePercentiles> hermite_percentiles;
  std::vector<std::string> notes;  // soft checks, skipped fits, timings

  bool any_cell_failed() const;
};

/// Lyapunov convergence sweep (final spectral error vs dt per eta/method),
/// with reference singular-value history and per-method order fits.
SweepOutcome run_convergence(const SweepConfig& config);

/// Rotation-curve robustness sweep over ranks (exact ambient solution).
SweepOutcome run_robustness(const SweepConfig& config);

/// Robustness sweep restricted to order estimation per (method, rank);
/// defaults to the projector-splitting schemes.
SweepOutcome run_order_check(const SweepConfig& config);

/// Hermite interpolant fragility: velocity errors at tau = 0, 1 over seeded
/// instances for each sigma_r, with percentile summaries.
SweepOutcome run_hermite_robustness(const SweepConfig& config);

/// Dispatch on config.experiment.
SweepOutcome run_experiment(const SweepConfig& config);

/// Least-squares slope of log(error) vs log(dt) for one method over rows,
/// excluding plateau-dominated points (error < 3x the sweep minimum).
/// Throws ConfigError when fewer than 4 usable points remain. The rows
/// passed in should belong to a single (rank, eta) group.
OrderEstimate estimate_order(const std::vector<SweepRow>& rows, const std::string& method);

/// Max over qualifying dts of the cross-rank error ratio for one method;
/// a dt qualifies when every rank's error sits >= 3x above that rank's own
/// plateau. Returns 0 when no dt qualifies.
double cross_rank_overlap_ratio(const std::vector<SweepRow>& rows, const std::string& method);

/// Writes results.csv / hermite CSVs / orders.csv / svhist CSVs / plot-data
/// files plus metadata.txt under out_dir. Rows are sorted by a deterministic
/// key so output bytes depend only on (config, seed), except wall-time
/// columns.
void emit(const SweepOutcome& outcome, const SweepConfig& config, const std::string& out_dir);

}  // namespace dlra
