#pragma once

#include <string>
#include <vector>

#include "core/coupled.hpp"
#include "core/grid.hpp"
#include "core/lab.hpp"

namespace hygrohom {

struct FieldSnapshot {
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;
  double time = 0.0;
  std::string name;
  Field values;  // nodal, row-major
};

FieldSnapshot make_snapshot(const StructuredGrid& grid, const Field& values,
                            const std::string& name, double time);

// CSV: header "x,y,value", row-major nodes, 17 significant digits.
void emit_snapshot_csv(const FieldSnapshot& snap, const std::string& path);
// VTK legacy STRUCTURED_POINTS, ASCII, POINT_DATA scalars.
void emit_snapshot_vtk(const FieldSnapshot& snap, const std::string& path);

Field read_snapshot_csv(const std::string& path);

void write_step_reports_csv(const std::vector<StepReport>& reports, const std::string& path);
void write_error_report_csv(const ErrorReport& report, const std::string& path);
void write_translation_csv(const TranslationReport& report, const std::string& path);

// Run manifest: config hash, version, seed, invariant summary.
void write_manifest(const std::string& path, std::uint64_t config_hash,
                    std::uint64_t seed, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace hygrohom
