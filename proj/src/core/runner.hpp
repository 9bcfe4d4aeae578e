#pragma once

#include <optional>
#include <string>

#include "core/config.hpp"
#include "core/coupled.hpp"
#include "core/lab.hpp"
#include "core/output.hpp"

namespace hygrohom {

enum class RunMode { meso, macro };

struct RunSummary {
  int steps_completed = 0;
  bool aborted = false;
  std::string abort_reason;
  double min_pressure = 0.0, max_pressure = 0.0;
  double min_temperature = 0.0, max_temperature = 0.0;
  double max_hydration = 0.0;
  bool invariants_ok = false;
  double worst_mass_balance = 0.0;
};

struct CellSummary {
  double chi_star = 0.0;
  double queried_contrast = 1.0;
  Mat2 normalized_tensor;  // K*(contrast) from a direct cell solve
};

// One context per parsed config; the C API wraps this class.
class Toolkit {
 public:
  explicit Toolkit(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  const CellRaster& raster() const { return raster_; }

  // Assumption checks; writes validation_report.json into the output dir.
  ValidationReport validate();

  // Builds both contrast tables, writes the table artifacts, and answers a
  // direct cell solve at the queried contrast.
  CellSummary run_cell(std::optional<double> contrast_query);

  // Full simulation in meso or macro mode with snapshot/report emission.
  RunSummary run_simulation(RunMode mode);

  ErrorReport run_converge();
  TranslationReport run_translate();

 private:
  void ensure_output_dir() const;
  void require_validated();
  Trajectory simulate(RunMode mode) const;
  void emit_trajectory(const Trajectory& traj, const std::string& prefix) const;

  RunConfig cfg_;
  CellRaster raster_;
  bool validated_ = false;
  std::optional<ContrastTable> moisture_table_;
  std::optional<ContrastTable> thermal_table_;
  void ensure_tables();
};

}  // namespace hygrohom
