#pragma once

#include <functional>
#include <vector>

#include "core/coupled.hpp"

namespace hygrohom {

// Deterministic initial data shared across grids: piecewise-constant noise on
// a fixed lattice so that every resolution samples the same function.
struct InitialFieldSpec {
  double base = 0.0;
  double amplitude = 0.0;
  int noise_cells = 0;  // lattice resolution; 0 disables the noise
  std::uint64_t seed = 0;

  double operator()(double x, double y) const;
};

Field sample_nodal(const StructuredGrid& grid, const InitialFieldSpec& spec);

// Space-time L2 distances between two trajectories, restricted by nodal
// sampling onto the coarsest common grid; trajectories may differ in time
// resolution if one step count divides the other.
struct SpaceTimeDistance {
  double pressure = 0.0;
  double temperature = 0.0;
  double hydration = 0.0;
  double boundary_pressure = 0.0;
  double boundary_temperature = 0.0;
};
SpaceTimeDistance l2_distance_spacetime(const Trajectory& a, const Trajectory& b,
                                        int base_resolution);

struct EpsilonSweepConfig {
  std::vector<double> epsilons;       // reciprocals of integers
  std::vector<int> meso_resolutions;  // one per epsilon
  int base_resolution = 32;           // comparison grid
  int macro_resolution = 32;
  int cell_resolution = 64;  // cell-problem grid for the contrast tables
  TimeStepConfig time;
  InitialFieldSpec initial_pressure;
  InitialFieldSpec initial_temperature;
  int threads = 0;
};

struct ErrorReport {
  std::vector<double> epsilons;
  std::vector<double> error_pressure;
  std::vector<double> error_temperature;
  std::vector<double> error_hydration;
  std::vector<double> boundary_error_pressure;
  std::vector<double> boundary_error_temperature;
  bool decreasing_pressure = false;     // informative
  bool decreasing_temperature = false;  // informative
};

ErrorReport run_epsilon_sweep(const EpsilonSweepConfig& cfg, const CellRaster& raster,
                              const MaterialLaws& laws);

// A priori estimate monitors (pure functions of the trajectory).
struct AprioriMonitor {
  std::vector<double> min_pressure, max_pressure;
  std::vector<double> max_abs_temperature;
  std::vector<double> max_hydration;
  std::vector<double> energy;         // int Theta(p(t)) dx, porosity-weighted
  std::vector<double> cumulative_h1;  // sum h * ||p||^2_W12
  bool max_principle_ok = true;
  bool temperature_bound_ok = true;
  bool memory_bounds_ok = true;
  bool energy_bound_ok = true;
  double worst_max_principle_margin = 0.0;
  double worst_energy_margin = 0.0;
};

AprioriMonitor check_apriori_bounds(const Trajectory& traj, const MaterialLaws& laws);

// Discrete time-translation functionals, exactly as the estimates are
// written: S-weighted product for p, plain L2 for theta and r.
struct TranslationReport {
  std::vector<double> taus;
  std::vector<double> e_pressure;
  std::vector<double> e_temperature;
  std::vector<double> e_hydration;
};

TranslationReport translation_estimate(const Trajectory& traj, const MaterialLaws& laws,
                                       const std::vector<double>& taus);

// Weak-convergence (oscillating average) test: | int chi_c(x/eps) g - chi*
// int g | per epsilon, with a shared per-box Gauss quadrature.
struct OscillatingAverageReport {
  std::vector<double> epsilons;
  std::vector<double> errors;
  std::vector<double> ratios;  // errors[k+1] / errors[k]
};

OscillatingAverageReport oscillating_average_test(
    const CellRaster& raster, const std::vector<double>& epsilons,
    const std::function<double(double, double)>& probe);

// Self-convergence in the time step: runs at h, h/2, h/4, ... and reports the
// observed order from successive differences.
struct SelfConvergenceResult {
  std::vector<int> step_counts;
  std::vector<double> pair_errors;  // combined relative successive distances
  std::vector<double> pressure_errors;
  std::vector<double> temperature_errors;
  std::vector<double> hydration_errors;
  double observed_order = 0.0;
};

SelfConvergenceResult timestep_self_convergence(const StructuredGrid& grid,
                                                const MaterialLaws& laws,
                                                const CoefficientProvider& provider,
                                                TimeStepConfig base,
                                                const std::vector<int>& step_counts,
                                                const Field& p0, const Field& theta0);

}  // namespace hygrohom
