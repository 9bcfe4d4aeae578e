#include "core/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "core/errors.hpp"

namespace hygrohom {

namespace fs = std::filesystem;

Toolkit::Toolkit(RunConfig cfg) : cfg_(std::move(cfg)) {
  raster_ = rasterize(cfg_.geometry, cfg_.raster_resolution);
}

void Toolkit::ensure_output_dir() const {
  std::error_code ec;
  fs::create_directories(cfg_.output_directory, ec);
  if (ec) throw IoError("cannot create output directory: " + cfg_.output_directory);
}

ValidationReport Toolkit::validate() {
  ValidationReport report = validate_assumptions(cfg_.laws, 400);
  ensure_output_dir();
  {
    std::ofstream out(fs::path(cfg_.output_directory) / "validation_report.json");
    out << report.to_json() << "\n";
  }
  validated_ = report.all_passed;
  return report;
}

void Toolkit::require_validated() {
  if (validated_) return;
  const ValidationReport report = validate();
  if (!report.all_passed) {
    std::string failed;
    for (const auto& check : report.checks)
      if (!check.passed)
        failed += (failed.empty() ? "" : "; ") + check.assumption + " " + check.name;
    throw ValidationError("assumption validation failed: " + failed);
  }
}

void Toolkit::ensure_tables() {
  if (moisture_table_ && thermal_table_) return;
  const auto& laws = cfg_.laws;
  const auto moisture_grid =
      log_contrast_grid(laws.moisture_contrast_min(), laws.moisture_contrast_max(),
                        cfg_.contrast_points_per_decade);
  const auto thermal_grid =
      log_contrast_grid(laws.thermal_contrast_min(), laws.thermal_contrast_max(),
                        cfg_.contrast_points_per_decade);
  int cell_res = cfg_.cell_resolution;
  if (cell_res % raster_.resolution() != 0)
    cell_res = raster_.resolution() *
               std::max(1, (cell_res + raster_.resolution() - 1) / raster_.resolution());
  moisture_table_ = ContrastTable::build(raster_, moisture_grid, cell_res, cfg_.threads);
  thermal_table_ = ContrastTable::build(raster_, thermal_grid, cell_res, cfg_.threads);
}

CellSummary Toolkit::run_cell(std::optional<double> contrast_query) {
  require_validated();
  ensure_output_dir();
  ensure_tables();

  const fs::path dir(cfg_.output_directory);
  moisture_table_->save((dir / "moisture_contrast_table.json").string());
  moisture_table_->export_csv((dir / "moisture_contrast_table.csv").string());
  thermal_table_->save((dir / "thermal_contrast_table.json").string());
  thermal_table_->export_csv((dir / "thermal_contrast_table.csv").string());

  CellSummary summary;
  summary.chi_star = volume_fraction(raster_);
  summary.queried_contrast = contrast_query.value_or(1.0);
  int cell_res = moisture_table_->resolution();
  summary.normalized_tensor =
      effective_tensor(raster_, summary.queried_contrast, 1.0, cell_res);

  write_manifest((dir / "manifest.json").string(), config_hash(cfg_), cfg_.seed, "cell",
                 {{"chi_star", std::to_string(summary.chi_star)}});
  return summary;
}

Trajectory Toolkit::simulate(RunMode mode) const {
  StructuredGrid grid(cfg_.grid_resolution, cfg_.grid_resolution);
  const Field p0 = sample_nodal(grid, cfg_.pressure_spec());
  const Field theta0 = sample_nodal(grid, cfg_.temperature_spec());

  if (mode == RunMode::meso) {
    MesoTiling tiling(cfg_.epsilon, raster_, cfg_.grid_resolution);
    MesoProvider provider(tiling, cfg_.laws);
    CoupledSolver solver(grid, cfg_.laws, provider, cfg_.time);
    return solver.run(p0, theta0, cfg_.time.steps);
  }
  MacroProvider provider(*moisture_table_, *thermal_table_, volume_fraction(raster_),
                         cfg_.laws);
  CoupledSolver solver(grid, cfg_.laws, provider, cfg_.time);
  return solver.run(p0, theta0, cfg_.time.steps);
}

void Toolkit::emit_trajectory(const Trajectory& traj, const std::string& prefix) const {
  const fs::path dir(cfg_.output_directory);
  const StructuredGrid& grid = *traj.grid;
  auto emit = [&](const Field& f, const std::string& name, double time, int idx) {
    const FieldSnapshot snap = make_snapshot(grid, f, name, time);
    const std::string stem = prefix + "_" + name + "_" + std::to_string(idx);
    if (cfg_.snapshot_format == "csv" || cfg_.snapshot_format == "both")
      emit_snapshot_csv(snap, (dir / (stem + ".csv")).string());
    if (cfg_.snapshot_format == "vtk" || cfg_.snapshot_format == "both")
      emit_snapshot_vtk(snap, (dir / (stem + ".vtk")).string());
  };
  const int n = traj.step_count();
  for (int k = 0; k <= n; ++k) {
    const bool last = k == n;
    const bool strided = cfg_.snapshot_stride > 0 && k % cfg_.snapshot_stride == 0;
    if (!last && !strided) continue;
    emit(traj.pressure[k], "pressure", traj.times[k], k);
    emit(traj.temperature[k], "temperature", traj.times[k], k);
    emit(traj.hydration[k], "hydration", traj.times[k], k);
  }
  write_step_reports_csv(traj.reports, (dir / (prefix + "_steps.csv")).string());
}

RunSummary Toolkit::run_simulation(RunMode mode) {
  require_validated();
  ensure_output_dir();
  if (mode == RunMode::macro) ensure_tables();

  const Trajectory traj = simulate(mode);
  const std::string prefix = mode == RunMode::meso ? "meso" : "macro";
  emit_trajectory(traj, prefix);

  RunSummary summary;
  summary.steps_completed = traj.step_count();
  summary.aborted = traj.aborted;
  summary.abort_reason = traj.abort_reason;
  if (!traj.reports.empty()) {
    summary.invariants_ok = true;
    summary.min_pressure = 1e300;
    summary.max_pressure = -1e300;
    summary.min_temperature = 1e300;
    summary.max_temperature = -1e300;
    for (const auto& r : traj.reports) {
      summary.min_pressure = std::min(summary.min_pressure, r.min_pressure);
      summary.max_pressure = std::max(summary.max_pressure, r.max_pressure);
      summary.min_temperature = std::min(summary.min_temperature, r.min_temperature);
      summary.max_temperature = std::max(summary.max_temperature, r.max_temperature);
      summary.max_hydration = std::max(summary.max_hydration, r.max_hydration);
      summary.worst_mass_balance = std::max(summary.worst_mass_balance, r.mass_balance_defect);
      summary.invariants_ok &= r.max_principle_ok && r.memory_bounds_ok && r.converged;
    }
  }

  const AprioriMonitor monitor = check_apriori_bounds(traj, cfg_.laws);
  summary.invariants_ok &= monitor.max_principle_ok && monitor.memory_bounds_ok &&
                           monitor.temperature_bound_ok && monitor.energy_bound_ok;

  write_manifest((fs::path(cfg_.output_directory) / "manifest.json").string(),
                 config_hash(cfg_), cfg_.seed, prefix,
                 {{"invariants", summary.invariants_ok ? "ok" : "violated"},
                  {"steps", std::to_string(summary.steps_completed)},
                  {"aborted", traj.aborted ? traj.abort_reason : "no"}});
  if (traj.aborted) throw SolverError("simulation aborted: " + traj.abort_reason);
  return summary;
}

ErrorReport Toolkit::run_converge() {
  require_validated();
  ensure_output_dir();

  EpsilonSweepConfig sweep;
  sweep.epsilons = cfg_.epsilon_list;
  if (sweep.epsilons.empty()) sweep.epsilons = {0.25, 0.125, 0.0625};
  sweep.base_resolution = cfg_.base_resolution > 0 ? cfg_.base_resolution : cfg_.grid_resolution;
  sweep.macro_resolution =
      cfg_.macro_resolution > 0 ? cfg_.macro_resolution : cfg_.grid_resolution;
  sweep.cell_resolution = cfg_.cell_resolution;
  sweep.time = cfg_.time;
  sweep.initial_pressure = cfg_.pressure_spec();
  sweep.initial_temperature = cfg_.temperature_spec();
  sweep.threads = cfg_.threads;

  if (!cfg_.meso_resolutions.empty()) {
    sweep.meso_resolutions = cfg_.meso_resolutions;
  } else {
    for (double eps : sweep.epsilons) {
      const int q = static_cast<int>(std::lround(1.0 / eps));
      const int pixels = q * raster_.resolution();
      sweep.meso_resolutions.push_back(std::lcm(pixels, sweep.base_resolution));
    }
  }

  const ErrorReport report = run_epsilon_sweep(sweep, raster_, cfg_.laws);
  const fs::path dir(cfg_.output_directory);
  write_error_report_csv(report, (dir / "epsilon_sweep.csv").string());
  write_manifest((dir / "manifest.json").string(), config_hash(cfg_), cfg_.seed, "converge",
                 {{"epsilons", std::to_string(report.epsilons.size())}});
  return report;
}

TranslationReport Toolkit::run_translate() {
  require_validated();
  ensure_output_dir();

  const Trajectory traj = simulate(RunMode::meso);
  if (traj.aborted) throw SolverError("translate: simulation aborted: " + traj.abort_reason);

  std::vector<double> taus = cfg_.translate_taus;
  if (taus.empty()) taus = {1, 2, 4, 8};
  const double h = cfg_.time.step();
  for (auto& tau : taus) tau *= h;  // config gives multiples of h

  const TranslationReport report = translation_estimate(traj, cfg_.laws, taus);
  const fs::path dir(cfg_.output_directory);
  write_translation_csv(report, (dir / "translation.csv").string());
  write_manifest((dir / "manifest.json").string(), config_hash(cfg_), cfg_.seed, "translate",
                 {{"taus", std::to_string(report.taus.size())}});
  return report;
}

}  // namespace hygrohom
