#include "dlra/experiments.hpp"

#include "dlra/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace dlra {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double spectral_norm(const Matrix& a) {
  return Eigen::BDCSVD<Matrix>(a).singularValues()(0);
}

Vector singular_values(const Matrix& a) { return Eigen::BDCSVD<Matrix>(a).singularValues(); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    out.push_back(std::stod(tok, &pos));
    if (pos != tok.size()) throw ConfigError("bad number in list: " + tok);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) {
    if (v != std::floor(v)) throw ConfigError("expected integer list");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Runs work(0..count-1) on up to `jobs` threads. Each index writes only its
// own output slot, so scheduling cannot affect results.
void parallel_cells(std::size_t count, int jobs,
                    const std::function<void(std::size_t)>& work) {
  const int threads = std::clamp(jobs, 1, 64);
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

void sort_rows(std::vector<SweepRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.eta, a.r, a.method, b.dt) < std::tie(b.eta, b.r, b.method, a.dt);
  });
}

struct Cell {
  StepperKind method;
  double dt;
  int r;
  double eta;
};

// Integrates one cell and fills the shared row fields.
SweepRow run_cell(const std::string& experiment, const SweepConfig& config, const Cell& cell,
                  const VectorField& field, const FixedRankPoint& y0, const Matrix& a_ref,
                  double best_approx) {
  SweepRow row;
  row.experiment = experiment;
  row.method = to_string(cell.method);
  row.n = config.n;
  row.r = cell.r;
  row.eta = cell.eta;
  row.dt = cell.dt;
  row.best_approx_error = best_approx;

  const auto tic = std::chrono::steady_clock::now();
  Trajectory traj;
  try {
    traj = integrate(cell.method, field, y0, config.T, cell.dt);
  } catch (const Error& e) {
    row.failed = true;
    row.failure_reason = e.what();
    row.final_error = kNaN;
    row.min_sigma_r = kNaN;
    return row;
  }
  row.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tic).count();

  if (!traj.ok()) {
    row.failed = true;
    row.failure_reason = "step " + std::to_string(traj.failure->step_index) + ": " +
                         traj.failure->reason;
    row.final_error = kNaN;
    row.min_sigma_r = traj.diagnostics.empty() ? kNaN : traj.min_sigma_r();
    return row;
  }

  row.final_error = spectral_norm(embed(traj.final_state()) - a_ref);
  row.min_sigma_r = traj.min_sigma_r();
  if (!std::isfinite(row.final_error)) {
    row.failed = true;
    row.failure_reason = "nonfinite final error";
  }
  return row;
}

std::vector<StepperKind> parse_methods(const std::vector<std::string>& names) {
  std::vector<StepperKind> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(stepper_from_string(name));
  return out;
}

// Order fits per (method, r, eta) group; groups too flat to fit are noted.
void append_order_fits(SweepOutcome& outcome) {
  std::map<std::tuple<std::string, int, std::string>, std::vector<SweepRow>> groups;
  for (const auto& row : outcome.rows)
    groups[{row.method, row.r, fmt(row.eta)}].push_back(row);
  for (const auto& [key, rows] : groups) {
    try {
      outcome.orders.push_back(estimate_order(rows, std::get<0>(key)));
    } catch (const Error& e) {
      outcome.notes.push_back("order fit skipped for " + std::get<0>(key) + " r=" +
                              std::to_string(std::get<1>(key)) + " eta=" + std::get<2>(key) +
                              ": " + e.what());
    }
  }
  std::sort(outcome.orders.begin(), outcome.orders.end(),
            [](const OrderEstimate& a, const OrderEstimate& b) {
              return std::tie(a.eta, a.r, a.method) < std::tie(b.eta, b.r, b.method);
            });
}

// Soft wall-clock ordering check (Table-2 analog): expected cost ordering
// PRK1 < AFE < PRK2 < RH < PRK3 < ARH.
void append_timing_note(SweepOutcome& outcome, double T) {
  std::map<std::string, std::pair<double, long>> per_method;  // total ms, total steps
  for (const auto& row : outcome.rows) {
    if (row.failed || row.dt <= 0.0) continue;
    per_method[row.method].first += row.wall_time_ms;
    per_method[row.method].second += std::lround(T / row.dt);
  }
  const std::vector<std::string> expected = {"PRK1", "AFE", "PRK2", "RH", "PRK3", "ARH"};
  std::vector<std::pair<std::string, double>> seen;
  for (const auto& name : expected) {
    auto it = per_method.find(name);
    if (it != per_method.end() && it->second.second > 0)
      seen.emplace_back(name, it->second.first / static_cast<double>(it->second.second));
  }
  for (const auto& [name, ms] : seen)
    outcome.notes.push_back("timing: " + name + " mean " + fmt(ms) + " ms/step");
  for (std::size_t i = 0; i + 1 < seen.size(); ++i) {
    if (seen[i].second > seen[i + 1].second)
      outcome.notes.push_back("timing-order warning: " + seen[i].first +
                              " slower per step than " + seen[i + 1].first +
                              " (hardware-dependent, non-failing)");
  }
}

}  // namespace

std::vector<double> default_dt_sweep(double T) {
  std::vector<double> dts;
  for (int k = 2; k <= 10; ++k) dts.push_back(T / std::pow(2.0, k));
  return dts;
}

void apply_defaults(SweepConfig& config) {
  const bool known = config.experiment == "convergence" || config.experiment == "robustness" ||
                     config.experiment == "hermite-robustness" ||
                     config.experiment == "order-check";
  if (!known) throw ConfigError("unknown experiment: " + config.experiment);

  if (config.dts.empty()) config.dts = default_dt_sweep(config.T);
  if (config.methods.empty()) {
    if (config.experiment == "convergence")
      for (StepperKind k : all_steppers()) config.methods.push_back(to_string(k));
    else if (config.experiment == "robustness")
      config.methods = {"AFE", "RH", "ARH"};
    else if (config.experiment == "order-check")
      config.methods = {"KSL", "KLS"};
  }
  if (config.sigma_rs.empty())
    for (int k = 1; k <= 8; ++k) config.sigma_rs.push_back(std::pow(10.0, -k));

  if (!(config.T > 0.0)) throw ConfigError("T must be positive");
  if (!(config.ref_tol > 0.0)) throw ConfigError("ref-tol must be positive");
  if (config.n < 1 || config.r < 1 || config.r > config.n)
    throw ConfigError("require 1 <= r <= n");
  if (config.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (config.instances < 1) throw ConfigError("instances must be >= 1");
  for (double dt : config.dts)
    if (!(dt > 0.0)) throw ConfigError("dt values must be positive");
  std::vector<double> sorted = config.dts;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("dt values must be distinct");
  if (config.experiment != "hermite-robustness") {
    if (config.methods.empty()) throw ConfigError("methods list must be nonempty");
    parse_methods(config.methods);  // validates names
  }
  for (int r : config.ranks)
    if (r < 1 || r > config.n) throw ConfigError("rank list entries must lie in [1, n]");
  for (double s : config.sigma_rs)
    if (!(s > 0.0) || s > 1.0) throw ConfigError("sigma_r values must lie in (0, 1]");
}

SweepConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  SweepConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "experiment") config.experiment = value;
      else if (key == "n") config.n = std::stoi(value);
      else if (key == "r") config.r = std::stoi(value);
      else if (key == "ranks") config.ranks = parse_int_list(value);
      else if (key == "eta") config.etas = parse_double_list(value);
      else if (key == "T") config.T = std::stod(value);
      else if (key == "dt_list") config.dts = parse_double_list(value);
      else if (key == "methods") {
        config.methods.clear();
        for (const auto& m : split(value, ',')) if (!m.empty()) config.methods.push_back(m);
      }
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "ref_tol") config.ref_tol = std::stod(value);
      else if (key == "out") config.out_dir = value;
      else if (key == "jobs") config.jobs = std::stoi(value);
      else if (key == "sigma_r_list") config.sigma_rs = parse_double_list(value);
      else if (key == "instances") config.instances = std::stoi(value);
      else throw ConfigError("unknown key: " + key);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return config;
}

bool SweepOutcome::any_cell_failed() const {
  for (const auto& row : rows)
    if (row.failed) return true;
  for (const auto& row : hermite_rows)
    if (row.failed) return true;
  return false;
}

SweepOutcome run_convergence(const SweepConfig& config) {
  SweepOutcome outcome;
  const auto methods = parse_methods(config.methods);

  for (double eta : config.etas) {
    const LyapunovProblem problem = make_lyapunov(config.n, config.r, eta, config.seed);
    const VectorField field = lyapunov_field(problem);
    const FixedRankPoint y0 = truncated_svd(problem.A0, config.r);

    // Reference path: 33 samples for the singular-value history; the last
    // sample is A_ref(T) used for all error columns.
    SvHistory history;
    history.eta = eta;
    const int samples = 33;
    for (int i = 0; i < samples; ++i)
      history.times.push_back(config.T * static_cast<double>(i) / (samples - 1));
    const std::vector<Matrix> path =
        reference_ambient_path(field, problem.A0, history.times, config.ref_tol);
    const Index sv_count = std::min<Index>(config.n, 2 * config.r);
    history.sigmas.resize(samples, sv_count);
    for (int i = 0; i < samples; ++i)
      history.sigmas.row(i) = singular_values(path[i]).head(sv_count).transpose();
    outcome.histories.push_back(std::move(history));

    const Matrix& a_ref = path.back();
    const Vector ref_sv = singular_values(a_ref);
    const double best_approx = (config.r < config.n) ? ref_sv(config.r) : 0.0;

    std::vector<Cell> cells;
    for (StepperKind method : methods)
      for (double dt : config.dts) cells.push_back({method, dt, config.r, eta});

    std::vector<SweepRow> rows(cells.size());
    parallel_cells(cells.size(), config.jobs, [&](std::size_t i) {
      rows[i] = run_cell("convergence", config, cells[i], field, y0, a_ref, best_approx);
    });
    outcome.rows.insert(outcome.rows.end(), rows.begin(), rows.end());
  }

  sort_rows(outcome.rows);
  append_order_fits(outcome);
  append_timing_note(outcome, config.T);
  return outcome;
}

namespace {

SweepOutcome run_rotation_sweep(const SweepConfig& config, const std::string& experiment) {
  SweepOutcome outcome;
  const auto methods = parse_methods(config.methods);
  const RotationProblem problem = make_rotation(config.n, config.seed);

  const Matrix a0 = rotation_curve(problem, 0.0).value;
  const Matrix a_ref = rotation_curve(problem, config.T).value;  // exact solution
  const Vector ref_sv = singular_values(a_ref);

  for (int r : config.ranks) {
    const VectorField field = rotation_field(problem);  // shared memo per rank
    const FixedRankPoint y0 = truncated_svd(a0, r);
    const double best_approx = (r < config.n) ? ref_sv(r) : 0.0;

    std::vector<Cell> cells;
    for (StepperKind method : methods)
      for (double dt : config.dts) cells.push_back({method, dt, r, 0.0});

    std::vector<SweepRow> rows(cells.size());
    parallel_cells(cells.size(), config.jobs, [&](std::size_t i) {
      rows[i] = run_cell(experiment, config, cells[i], field, y0, a_ref, best_approx);
    });
    outcome.rows.insert(outcome.rows.end(), rows.begin(), rows.end());
  }

  sort_rows(outcome.rows);
  append_order_fits(outcome);

  for (const auto& name : config.methods) {
    const double ratio = cross_rank_overlap_ratio(outcome.rows, name);
    if (ratio > 0.0)
      outcome.notes.push_back("overlap: " + name + " max cross-rank error ratio " + fmt(ratio));
  }
  return outcome;
}

}  // namespace

SweepOutcome run_robustness(const SweepConfig& config) {
  return run_rotation_sweep(config, "robustness");
}

SweepOutcome run_order_check(const SweepConfig& config) {
  return run_rotation_sweep(config, "order-check");
}

SweepOutcome run_hermite_robustness(const SweepConfig& config) {
  SweepOutcome outcome;

  struct Task {
    double sigma_r;
    int sigma_index;
    int instance;
  };
  std::vector<Task> tasks;
  for (std::size_t si = 0; si < config.sigma_rs.size(); ++si)
    for (int inst = 0; inst < config.instances; ++inst)
      tasks.push_back({config.sigma_rs[si], static_cast<int>(si), inst});

  std::vector<HermiteRow> rows(tasks.size());
  parallel_cells(tasks.size(), config.jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    HermiteRow row;
    row.sigma_r = task.sigma_r;
    row.instance = task.instance;
    try {
      const HermiteRobustnessInstance inst = make_hermite_instance(
          task.sigma_r,
          mix_seed(config.seed, {static_cast<std::uint64_t>(task.sigma_index),
                                 static_cast<std::uint64_t>(task.instance)}));
      HermiteData data;
      data.p0 = {0.0, inst.y0, inst.z0, std::nullopt};
      data.p1 = {1.0, inst.y1, inst.z1, std::nullopt};

      const double h = 1e-6;
      auto velocity_at = [&](double tau) {
        const Matrix hi = embed(hermite_eval(data, RetractionKind::Orth, tau + h));
        const Matrix lo = embed(hermite_eval(data, RetractionKind::Orth, tau - h));
        return Matrix(((hi - lo) / (2.0 * h)).eval());
      };
      row.err_v0 = (embed_tangent(inst.y0, inst.z0) - velocity_at(0.0)).norm();
      row.err_v1 = (embed_tangent(inst.y1, inst.z1) - velocity_at(1.0)).norm();
    } catch (const Error& e) {
      row.failed = true;
      row.failure_reason = e.what();
      row.err_v0 = kNaN;
      row.err_v1 = kNaN;
    }
    rows[i] = row;
  });
  outcome.hermite_rows = std::move(rows);

  std::sort(outcome.hermite_rows.begin(), outcome.hermite_rows.end(),
            [](const HermiteRow& a, const HermiteRow& b) {
              return std::tie(a.sigma_r, a.instance) < std::tie(b.sigma_r, b.instance);
            });

  for (double sigma : config.sigma_rs) {
    for (int tau = 0; tau <= 1; ++tau) {
      std::vector<double> errs;
      int failures = 0;
      for (const auto& row : outcome.hermite_rows) {
        if (row.sigma_r != sigma) continue;
        if (row.failed) {
          ++failures;
          continue;
        }
        errs.push_back(tau == 0 ? row.err_v0 : row.err_v1);
      }
      HermitePercentiles p;
      p.sigma_r = sigma;
      p.tau = tau;
      p.samples = static_cast<int>(errs.size());
      p.failures = failures;
      if (!errs.empty()) {
        p.p05 = percentile(errs, 5.0);
        p.p25 = percentile(errs, 25.0);
        p.p50 = percentile(errs, 50.0);
        p.p75 = percentile(errs, 75.0);
        p.p95 = percentile(errs, 95.0);
      } else {
        p.p05 = p.p25 = p.p50 = p.p75 = p.p95 = kNaN;
      }
      outcome.hermite_percentiles.push_back(p);
    }
  }
  std::sort(outcome.hermite_percentiles.begin(), outcome.hermite_percentiles.end(),
            [](const HermitePercentiles& a, const HermitePercentiles& b) {
              return std::tie(a.sigma_r, a.tau) < std::tie(b.sigma_r, b.tau);
            });
  return outcome;
}

SweepOutcome run_experiment(const SweepConfig& config) {
  SweepConfig cfg = config;
  apply_defaults(cfg);
  if (cfg.experiment == "convergence") return run_convergence(cfg);
  if (cfg.experiment == "robustness") return run_robustness(cfg);
  if (cfg.experiment == "order-check") return run_order_check(cfg);
  if (cfg.experiment == "hermite-robustness") return run_hermite_robustness(cfg);
  throw ConfigError("unknown experiment: " + cfg.experiment);
}

OrderEstimate estimate_order(const std::vector<SweepRow>& rows, const std::string& method) {
  std::vector<const SweepRow*> usable;
  double plateau = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    if (row.method != method || row.failed || !std::isfinite(row.final_error)) continue;
    usable.push_back(&row);
    plateau = std::min(plateau, row.final_error);
  }
  if (usable.size() < 4)
    throw ConfigError("estimate_order: fewer than 4 dt points for " + method);

  std::vector<double> dts, errs;
  for (const SweepRow* row : usable) {
    if (row->final_error >= 3.0 * plateau) {
      dts.push_back(row->dt);
      errs.push_back(row->final_error);
    }
  }
  if (dts.size() < 4)
    throw ConfigError("estimate_order: fewer than 4 usable points above plateau for " + method);

  const SlopeFit fit = fit_loglog_slope(dts, errs);
  OrderEstimate est;
  est.method = method;
  est.r = usable.front()->r;
  est.eta = usable.front()->eta;
  est.slope = fit.slope;
  est.slope_stderr = fit.stderr_slope;
  est.dt_min = *std::min_element(dts.begin(), dts.end());
  est.dt_max = *std::max_element(dts.begin(), dts.end());
  est.points = fit.points;
  est.plateau = plateau;
  return est;
}

double cross_rank_overlap_ratio(const std::vector<SweepRow>& rows, const std::string& method) {
  // errors[dt][r] and per-rank plateaus
  std::map<double, std::map<int, double>> by_dt;
  std::map<int, double> plateau;
  for (const auto& row : rows) {
    if (row.method != method || row.failed || !std::isfinite(row.final_error)) continue;
    by_dt[row.dt][row.r] = row.final_error;
    auto it = plateau.find(row.r);
    plateau[row.r] = (it == plateau.end()) ? row.final_error
                                           : std::min(it->second, row.final_error);
  }
  if (plateau.size() < 2) return 0.0;

  double worst = 0.0;
  for (const auto& [dt, per_rank] : by_dt) {
    if (per_rank.size() != plateau.size()) continue;
    bool qualifies = true;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& [r, err] : per_rank) {
      if (err < 3.0 * plateau[r]) {
        qualifies = false;
        break;
      }
      lo = std::min(lo, err);
      hi = std::max(hi, err);
    }
    if (qualifies && lo > 0.0) worst = std::max(worst, hi / lo);
  }
  return worst;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
}

std::string results_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "experiment,method,n,r,eta,dt,final_error_2norm,best_approx_error_2norm,"
      "min_sigma_r,wall_time_ms,failed,failure_reason\n";
  for (const auto& r : rows) {
    out += csv_field(r.experiment) + ',' + csv_field(r.method) + ',' + std::to_string(r.n) +
           ',' + std::to_string(r.r) + ',' + fmt(r.eta) + ',' + fmt(r.dt) + ',' +
           fmt(r.final_error) + ',' + fmt(r.best_approx_error) + ',' + fmt(r.min_sigma_r) +
           ',' + fmt(r.wall_time_ms) + ',' + (r.failed ? "1" : "0") + ',' +
           csv_field(r.failure_reason) + '\n';
  }
  return out;
}

std::string orders_csv(const std::vector<OrderEstimate>& orders) {
  std::string out = "method,r,eta,slope,slope_stderr,dt_min,dt_max,points,plateau\n";
  for (const auto& o : orders) {
    out += csv_field(o.method) + ',' + std::to_string(o.r) + ',' + fmt(o.eta) + ',' +
           fmt(o.slope) + ',' + fmt(o.slope_stderr) + ',' + fmt(o.dt_min) + ',' +
           fmt(o.dt_max) + ',' + std::to_string(o.points) + ',' + fmt(o.plateau) + '\n';
  }
  return out;
}

std::string hermite_raw_csv(const std::vector<HermiteRow>& rows) {
  std::string out = "sigma_r,instance,err_v0,err_v1,failed,failure_reason\n";
  for (const auto& r : rows) {
    out += fmt(r.sigma_r) + ',' + std::to_string(r.instance) + ',' + fmt(r.err_v0) + ',' +
           fmt(r.err_v1) + ',' + (r.failed ? "1" : "0") + ',' + csv_field(r.failure_reason) +
           '\n';
  }
  return out;
}

std::string hermite_percentiles_csv(const std::vector<HermitePercentiles>& rows) {
  std::string out = "sigma_r,tau,p05,p25,p50,p75,p95,samples,failures\n";
  for (const auto& r : rows) {
    out += fmt(r.sigma_r) + ',' + std::to_string(r.tau) + ',' + fmt(r.p05) + ',' +
           fmt(r.p25) + ',' + fmt(r.p50) + ',' + fmt(r.p75) + ',' + fmt(r.p95) + ',' +
           std::to_string(r.samples) + ',' + std::to_string(r.failures) + '\n';
  }
  return out;
}

std::string config_text(const SweepConfig& c) {
  auto join_d = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
  };
  auto join_i = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  auto join_s = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  };
  std::string out;
  out += "version = " + std::string(kVersion) + "\n";
  out += "experiment = " + c.experiment + "\n";
  out += "n = " + std::to_string(c.n) + "\n";
  out += "r = " + std::to_string(c.r) + "\n";
  out += "ranks = " + join_i(c.ranks) + "\n";
  out += "eta = " + join_d(c.etas) + "\n";
  out += "T = " + fmt(c.T) + "\n";
  out += "dt_list = " + join_d(c.dts) + "\n";
  out += "methods = " + join_s(c.methods) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "ref_tol = " + fmt(c.ref_tol) + "\n";
  out += "jobs = " + std::to_string(c.jobs) + "\n";
  out += "sigma_r_list = " + join_d(c.sigma_rs) + "\n";
  out += "instances = " + std::to_string(c.instances) + "\n";
  return out;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '.' || c == '/' || c == ' ') c = '_';
  return s;
}

}  // namespace

void emit(const SweepOutcome& outcome, const SweepConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  if (config.experiment == "hermite-robustness") {
    write_file(dir / "hermite_raw.csv", hermite_raw_csv(outcome.hermite_rows));
    write_file(dir / "hermite_percentiles.csv",
               hermite_percentiles_csv(outcome.hermite_percentiles));
  } else {
    write_file(dir / "results.csv", results_csv(outcome.rows));
    if (!outcome.orders.empty()) write_file(dir / "orders.csv", orders_csv(outcome.orders));

    // Per-cell plot data: dt vs error, one file per (method, rank, eta).
    fs::create_directories(dir / "plotdata");
    std::map<std::string, std::string> plots;
    for (const auto& row : outcome.rows) {
      if (row.failed) continue;
      const std::string key =
          row.method + "_r" + std::to_string(row.r) + "_eta" + sanitize(fmt(row.eta));
      if (plots.find(key) == plots.end()) plots[key] = "dt,error\n";
      plots[key] += fmt(row.dt) + ',' + fmt(row.final_error) + '\n';
    }
    for (const auto& [key, contents] : plots)
      write_file(dir / "plotdata" / (key + ".csv"), contents);

    for (std::size_t i = 0; i < outcome.histories.size(); ++i) {
      const SvHistory& h = outcome.histories[i];
      std::string out = "t";
      for (Index j = 0; j < h.sigmas.cols(); ++j)
        out += ",sigma_" + std::to_string(j + 1);
      out += '\n';
      for (std::size_t k = 0; k < h.times.size(); ++k) {
        out += fmt(h.times[k]);
        for (Index j = 0; j < h.sigmas.cols(); ++j) out += ',' + fmt(h.sigmas(k, j));
        out += '\n';
      }
      write_file(dir / ("svhist_eta" + sanitize(fmt(h.eta)) + ".csv"), out);
    }
  }

  std::string meta = config_text(config);
  for (const auto& note : outcome.notes) meta += "# " + note + "\n";
  write_file(dir / "metadata.txt", meta);
}

}  // namespace dlra
