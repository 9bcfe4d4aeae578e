#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/coupled.hpp"
#include "core/lab.hpp"
#include "core/material.hpp"
#include "core/microstructure.hpp"

namespace hygrohom {

// Full run configuration parsed from JSON. All physical quantities in SI.
struct RunConfig {
  UnitCellGeometry geometry = UniformCell{Phase::cement};
  int raster_resolution = 8;
  MaterialLaws laws;

  int grid_resolution = 32;
  TimeStepConfig time;

  double initial_pressure = -2e4;
  double initial_temperature = 303.15;
  double pressure_noise_amplitude = 0.0;
  double temperature_noise_amplitude = 0.0;
  int noise_cells = 0;

  double epsilon = 0.25;  // meso-mode scale
  std::vector<double> epsilon_list;
  std::vector<int> meso_resolutions;
  int base_resolution = 0;   // defaults to grid_resolution
  int macro_resolution = 0;  // defaults to grid_resolution

  int cell_resolution = 64;
  int contrast_points_per_decade = 33;

  std::vector<double> translate_taus;  // multiples of h

  std::string output_directory = "out";
  int snapshot_stride = 0;  // 0: only final snapshot
  std::string snapshot_format = "csv";  // csv | vtk | both
  std::uint64_t seed = 0;
  int threads = 0;

  std::string source_text;  // canonical JSON for hashing / manifest

  InitialFieldSpec pressure_spec() const;
  InitialFieldSpec temperature_spec() const;
};

// Parses and validates a config file; error messages carry a JSON-pointer
// style path to the offending key. Assumption validation is NOT run here;
// call validate_assumptions separately (the CLI always does).
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<memory>");

std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace hygrohom
