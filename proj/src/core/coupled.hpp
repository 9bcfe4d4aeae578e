#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/assemble.hpp"
#include "core/cell_solver.hpp"
#include "core/grid.hpp"
#include "core/material.hpp"
#include "core/microstructure.hpp"
#include "core/types.hpp"

namespace hygrohom {

struct TimeStepConfig {
  double final_time = 2000.0;  // s
  int steps = 50;
  double picard_tolerance = 1e-9;  // relative pressure-step residual
  int picard_max_iterations = 200;
  double picard_damping = 0.7;
  double linear_tolerance = 1e-10;

  double step() const { return final_time / steps; }
};

struct StepReport {
  int step = 0;
  double time = 0.0;
  int picard_iterations = 0;
  double pressure_residual = 0.0;
  double temperature_residual = 0.0;
  bool converged = false;
  bool max_principle_ok = true;
  bool memory_bounds_ok = true;
  double min_pressure = 0.0, max_pressure = 0.0;
  double min_temperature = 0.0, max_temperature = 0.0;
  double min_hydration = 0.0, max_hydration = 0.0;
  double mass_balance_defect = 0.0;  // relative, constant-test-function residual
  double max_element_peclet = 0.0;
  double wall_seconds = 0.0;
};

struct SimulationState {
  int index = 0;
  double time = 0.0;
  Field pressure;     // Pa
  Field temperature;  // K
  Field hydration;    // dimensionless memory
};

// Per-element coefficients; meso mode resolves the microstructure, macro mode
// evaluates effective tensors from the contrast tables. Both feed the same
// scheme.
class CoefficientProvider {
 public:
  virtual ~CoefficientProvider() = default;
  // Cement indicator (0/1) in meso mode, volume fraction chi* in macro mode.
  virtual double cement_fraction(int element) const = 0;
  // Pressure-flux prefactor P_e: the discrete moisture flux is P_e grad(u)
  // with u the Kirchhoff variable, i.e. a(x, p, ...) = P_e k~_r(p).
  virtual Mat2 pressure_prefactor(int element, double r, double theta) const = 0;
  virtual Mat2 thermal_tensor(int element, double p, double theta, double r) const = 0;
};

class MesoProvider : public CoefficientProvider {
 public:
  MesoProvider(const MesoTiling& tiling, const MaterialLaws& laws);
  double cement_fraction(int element) const override;
  Mat2 pressure_prefactor(int element, double r, double theta) const override;
  Mat2 thermal_tensor(int element, double p, double theta, double r) const override;

 private:
  const MaterialLaws* laws_;
  int nx_;
  std::vector<std::uint8_t> cement_;
};

class MacroProvider : public CoefficientProvider {
 public:
  MacroProvider(const ContrastTable& moisture_table, const ContrastTable& thermal_table,
                double chi_star, const MaterialLaws& laws);
  double cement_fraction(int) const override { return chi_star_; }
  Mat2 pressure_prefactor(int element, double r, double theta) const override;
  Mat2 thermal_tensor(int element, double p, double theta, double r) const override;

 private:
  const ContrastTable* moisture_;
  const ContrastTable* thermal_;
  double chi_star_;
  const MaterialLaws* laws_;
};

struct Trajectory {
  const StructuredGrid* grid = nullptr;
  double step_size = 0.0;
  std::vector<double> times;
  std::vector<Field> pressure;
  std::vector<Field> temperature;
  std::vector<Field> hydration;
  std::vector<StepReport> reports;
  // Phase-weighted lumped masses of the run's geometry; monitors need them to
  // evaluate the phase-split energy exactly.
  Field mass_cement;
  Field mass_aggregate;
  bool aborted = false;
  std::string abort_reason;

  int step_count() const { return static_cast<int>(times.size()) - 1; }
};

// Semi-implicit scheme: nonlinear pressure step through the Kirchhoff
// variable, explicit memory update, linear temperature step with lagged
// coefficients.
class CoupledSolver {
 public:
  CoupledSolver(const StructuredGrid& grid, const MaterialLaws& laws,
                const CoefficientProvider& provider, TimeStepConfig cfg);

  std::pair<Field, StepReport> pressure_step(const SimulationState& prev) const;
  Field memory_step(const Field& p_new, const SimulationState& prev) const;
  std::pair<Field, StepReport> temperature_step(const Field& p_new, const Field& r_new,
                                                const SimulationState& prev) const;

  Trajectory run(const Field& p0, const Field& theta0, int n_steps) const;

  const KirchhoffMap& kirchhoff() const { return kirchhoff_; }
  const Field& cement_lumped_mass() const { return mass_cement_; }
  const Field& aggregate_lumped_mass() const { return mass_aggregate_; }

 private:
  struct PressureWork;
  void evaluate_pressure_residual(PressureWork& w, const SimulationState& prev) const;

  const StructuredGrid* grid_;
  const MaterialLaws* laws_;
  const CoefficientProvider* provider_;
  TimeStepConfig cfg_;
  KirchhoffMap kirchhoff_;
  Field mass_cement_;     // phase-weighted lumped masses (geometry only)
  Field mass_aggregate_;
  Field robin_boundary_;  // beta_e-weighted boundary lumped mass
};

}  // namespace hygrohom
