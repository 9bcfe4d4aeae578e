#include "core/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "json.hpp"

namespace hygrohom {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

FieldSnapshot make_snapshot(const StructuredGrid& grid, const Field& values,
                            const std::string& name, double time) {
  if (static_cast<int>(values.size()) != grid.node_count())
    throw IoError("snapshot: field size does not match grid");
  return {grid.nx(), grid.ny(), grid.hx(), grid.hy(), time, name, values};
}

void emit_snapshot_csv(const FieldSnapshot& snap, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write snapshot: " + path);
  out << "x,y,value\n";
  for (int j = 0; j <= snap.ny; ++j)
    for (int i = 0; i <= snap.nx; ++i) {
      const std::size_t n = static_cast<std::size_t>(j) * (snap.nx + 1) + i;
      out << fmt17(i * snap.hx) << "," << fmt17(j * snap.hy) << ","
          << fmt17(snap.values[n]) << "\n";
    }
}

void emit_snapshot_vtk(const FieldSnapshot& snap, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write snapshot: " + path);
  const int nx = snap.nx + 1, ny = snap.ny + 1;
  out << "# vtk DataFile Version 3.0\n";
  out << snap.name << " t=" << fmt17(snap.time) << "\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << nx << " " << ny << " 1\n";
  out << "ORIGIN 0 0 0\n";
  out << "SPACING " << fmt17(snap.hx) << " " << fmt17(snap.hy) << " 1\n";
  out << "POINT_DATA " << nx * ny << "\n";
  out << "SCALARS " << snap.name << " double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (double v : snap.values) out << fmt17(v) << "\n";
}

Field read_snapshot_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshot: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "x,y,value")
    throw IoError("snapshot csv: bad header in " + path);
  Field values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c2 = line.rfind(',');
    if (c2 == std::string::npos) throw IoError("snapshot csv: bad row in " + path);
    values.push_back(std::stod(line.substr(c2 + 1)));
  }
  return values;
}

void write_step_reports_csv(const std::vector<StepReport>& reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write step reports: " + path);
  out << "step,time,picard_iterations,pressure_residual,temperature_residual,"
         "converged,max_principle_ok,memory_bounds_ok,min_p,max_p,min_theta,max_theta,"
         "max_r,mass_balance_defect,max_peclet,wall_seconds\n";
  for (const auto& r : reports) {
    out << r.step << "," << fmt17(r.time) << "," << r.picard_iterations << ","
        << fmt17(r.pressure_residual) << "," << fmt17(r.temperature_residual) << ","
        << (r.converged ? 1 : 0) << "," << (r.max_principle_ok ? 1 : 0) << ","
        << (r.memory_bounds_ok ? 1 : 0) << "," << fmt17(r.min_pressure) << ","
        << fmt17(r.max_pressure) << "," << fmt17(r.min_temperature) << ","
        << fmt17(r.max_temperature) << "," << fmt17(r.max_hydration) << ","
        << fmt17(r.mass_balance_defect) << "," << fmt17(r.max_element_peclet) << ","
        << fmt17(r.wall_seconds) << "\n";
  }
}

void write_error_report_csv(const ErrorReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write error report: " + path);
  out << "epsilon,error_p,error_theta,error_r,boundary_error_p,boundary_error_theta\n";
  for (std::size_t k = 0; k < report.epsilons.size(); ++k)
    out << fmt17(report.epsilons[k]) << "," << fmt17(report.error_pressure[k]) << ","
        << fmt17(report.error_temperature[k]) << "," << fmt17(report.error_hydration[k])
        << "," << fmt17(report.boundary_error_pressure[k]) << ","
        << fmt17(report.boundary_error_temperature[k]) << "\n";
}

void write_translation_csv(const TranslationReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write translation report: " + path);
  out << "tau,E_p,E_theta,E_r\n";
  for (std::size_t k = 0; k < report.taus.size(); ++k)
    out << fmt17(report.taus[k]) << "," << fmt17(report.e_pressure[k]) << ","
        << fmt17(report.e_temperature[k]) << "," << fmt17(report.e_hydration[k]) << "\n";
}

void write_manifest(const std::string& path, std::uint64_t config_hash,
                    std::uint64_t seed, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  nlohmann::json j;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash));
  j["config_hash"] = buf;
  j["seed"] = seed;
  j["command"] = command;
  j["version"] = "0.1.0";
  for (const auto& [key, value] : entries) j[key] = value;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace hygrohom
