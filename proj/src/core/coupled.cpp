#include "core/coupled.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "core/errors.hpp"
#include "core/sparse.hpp"

namespace hygrohom {

MesoProvider::MesoProvider(const MesoTiling& tiling, const MaterialLaws& laws)
    : laws_(&laws), nx_(tiling.macro_resolution()) {
  cement_.resize(static_cast<std::size_t>(nx_) * nx_);
  for (int j = 0; j < nx_; ++j)
    for (int i = 0; i < nx_; ++i)
      cement_[static_cast<std::size_t>(j) * nx_ + i] =
          tiling.element_phase(i, j) == Phase::cement ? 1 : 0;
}

double MesoProvider::cement_fraction(int element) const { return cement_[element]; }

Mat2 MesoProvider::pressure_prefactor(int element, double r, double theta) const {
  const double k = cement_[element] ? laws_->permeability.cement(r)
                                    : laws_->permeability.aggregate;
  return Mat2::scalar(laws_->constants.rho_w * k / laws_->viscosity.value(theta));
}

Mat2 MesoProvider::thermal_tensor(int element, double p, double theta, double r) const {
  const Phase phase = cement_[element] ? Phase::cement : Phase::aggregate;
  return Mat2::scalar(laws_->thermal_conductivity(phase, p, theta, r));
}

MacroProvider::MacroProvider(const ContrastTable& moisture_table,
                             const ContrastTable& thermal_table, double chi_star,
                             const MaterialLaws& laws)
    : moisture_(&moisture_table), thermal_(&thermal_table), chi_star_(chi_star),
      laws_(&laws) {}

Mat2 MacroProvider::pressure_prefactor(int, double r, double theta) const {
  const double contrast = laws_->permeability.cement(r) / laws_->permeability.aggregate;
  const double scale = laws_->constants.rho_w * laws_->permeability.aggregate /
                       laws_->viscosity.value(theta);
  return moisture_->query(contrast).scaled(scale);
}

Mat2 MacroProvider::thermal_tensor(int, double p, double theta, double r) const {
  const double la = laws_->thermal_conductivity(Phase::aggregate, p, theta, r);
  const double lc = laws_->thermal_conductivity(Phase::cement, p, theta, r);
  return thermal_->query(lc / la).scaled(la);
}

CoupledSolver::CoupledSolver(const StructuredGrid& grid, const MaterialLaws& laws,
                             const CoefficientProvider& provider, TimeStepConfig cfg)
    : grid_(&grid), laws_(&laws), provider_(&provider), cfg_(cfg), kirchhoff_(laws) {
  if (!(cfg_.final_time > 0.0) || cfg_.steps < 1)
    throw ConfigError("time stepping: final_time > 0 and steps >= 1 required");
  if (!(cfg_.picard_tolerance > 0.0))
    throw ConfigError("time stepping: picard tolerance must be positive");

  Field frac_c(grid.element_count()), frac_a(grid.element_count());
  for (int e = 0; e < grid.element_count(); ++e) {
    const double c = provider.cement_fraction(e);
    frac_c[e] = c;
    frac_a[e] = 1.0 - c;
  }
  mass_cement_ = assemble_lumped_mass(grid, frac_c);
  mass_aggregate_ = assemble_lumped_mass(grid, frac_a);

  robin_boundary_ = boundary_lumped_mass(grid);
  for (auto& v : robin_boundary_) v *= laws.constants.beta_e;
}

struct CoupledSolver::PressureWork {
  // inputs per iteration
  Field u;  // Kirchhoff variable
  // outputs
  Field p;        // kappa^{-1}(u)
  Field rate;     // f(p, theta_prev, r_prev)
  Field r_trial;  // r_prev + h f
  Field residual;
  Field chord;  // diagonal chord slopes
  Field ku;     // K_P u
  const SparseOperator* stiffness = nullptr;
  Field load_g;  // previous-level mass term
  double h = 0.0;
};

void CoupledSolver::evaluate_pressure_residual(PressureWork& w,
                                               const SimulationState& prev) const {
  const auto& c = laws_->constants;
  const int n = grid_->node_count();
  w.stiffness->multiply(w.u, w.ku);
  for (int i = 0; i < n; ++i) {
    const double p = kirchhoff_.inverse(w.u[i]);
    w.p[i] = p;
    const double f = laws_->hydration_rate(p, prev.temperature[i], prev.hydration[i]);
    w.rate[i] = f;
    w.r_trial[i] = prev.hydration[i] + w.h * f;
    const double sat = laws_->saturation.value(p);
    const double mass = (c.rho_w / w.h) * (mass_cement_[i] * laws_->porosity.cement(w.r_trial[i]) +
                                           mass_aggregate_[i] * laws_->porosity.aggregate) *
                        sat;
    w.residual[i] = mass - w.load_g[i] + w.ku[i] + robin_boundary_[i] * (p - c.p_inf) -
                    c.alpha_1 * mass_cement_[i] * f;
    const double ktr = kirchhoff_.truncated_permeability(p);
    w.chord[i] = (c.rho_w / w.h) *
                     (mass_cement_[i] * laws_->porosity.cement(w.r_trial[i]) +
                      mass_aggregate_[i] * laws_->porosity.aggregate) *
                     laws_->saturation.derivative(p) / ktr +
                 robin_boundary_[i] / ktr;
  }
}

std::pair<Field, StepReport> CoupledSolver::pressure_step(const SimulationState& prev) const {
  const auto start = std::chrono::steady_clock::now();
  const auto& c = laws_->constants;
  const int n = grid_->node_count();
  const double h = cfg_.step();

  StepReport report;
  report.step = prev.index + 1;
  report.time = prev.time + h;

  // Lagged per-element prefactors P_e.
  std::vector<Mat2> prefactor(grid_->element_count());
  for (int e = 0; e < grid_->element_count(); ++e) {
    const double r_e = grid_->element_value(prev.hydration, e);
    const double th_e = grid_->element_value(prev.temperature, e);
    prefactor[e] = provider_->pressure_prefactor(e, r_e, th_e);
  }
  const SparseOperator stiffness = assemble_diffusion_tensor(*grid_, prefactor);
  const Field base_diag = stiffness.diagonal();

  PressureWork w;
  w.h = h;
  w.stiffness = &stiffness;
  w.u.resize(n);
  w.p.resize(n);
  w.rate.resize(n);
  w.r_trial.resize(n);
  w.residual.resize(n);
  w.chord.resize(n);
  w.ku.resize(n);
  w.load_g.resize(n);

  for (int i = 0; i < n; ++i) {
    w.u[i] = kirchhoff_.forward(prev.pressure[i]);
    const double sat = laws_->saturation.value(prev.pressure[i]);
    w.load_g[i] = (c.rho_w / h) *
                  (mass_cement_[i] * laws_->porosity.cement(prev.hydration[i]) +
                   mass_aggregate_[i] * laws_->porosity.aggregate) *
                  sat;
  }

  // Residual scale: previous-level mass plus boundary load.
  double scale = 0.0;
  {
    Field tmp(n);
    for (int i = 0; i < n; ++i) tmp[i] = robin_boundary_[i] * c.p_inf;
    scale = norm2(w.load_g) + norm2(tmp);
    if (scale <= 0.0) scale = 1.0;
  }

  SparseOperator iteration_matrix = stiffness;
  const double u_max = kirchhoff_.u_table_max();

  bool converged = false;
  int iters = 0;
  evaluate_pressure_residual(w, prev);
  double res_norm = norm2(w.residual);
  while (iters < cfg_.picard_max_iterations) {
    if (res_norm <= cfg_.picard_tolerance * scale) {
      converged = true;
      break;
    }
    Field diag(n);
    for (int i = 0; i < n; ++i) diag[i] = base_diag[i] + w.chord[i];
    iteration_matrix.set_diagonal(diag);
    SolveResult lin = solve_spd(iteration_matrix, w.residual, cfg_.linear_tolerance);
    for (int i = 0; i < n; ++i) {
      w.u[i] -= cfg_.picard_damping * lin.x[i];
      if (w.u[i] > u_max) w.u[i] = u_max;  // keep inside the tabulated range
    }
    ++iters;
    evaluate_pressure_residual(w, prev);
    res_norm = norm2(w.residual);
  }

  report.picard_iterations = iters;
  report.pressure_residual = res_norm / scale;
  report.converged = converged;
  if (!converged)
    throw SolverError("pressure step: no convergence in " +
                          std::to_string(cfg_.picard_max_iterations) +
                          " iterations (residual " + std::to_string(res_norm / scale) + ")",
                      {res_norm / scale});

  // Constant-test-function mass balance: sum of the converged residual equals
  // time term minus (source - boundary flux) because the stiffness has zero
  // column sums.
  {
    double defect = 0.0, denom = 0.0;
    for (int i = 0; i < n; ++i) {
      defect += w.residual[i] - w.ku[i];
      denom += std::abs(w.load_g[i]);
    }
    report.mass_balance_defect = std::abs(defect) / std::max(denom, 1e-300);
  }

  report.min_pressure = *std::min_element(w.p.begin(), w.p.end());
  report.max_pressure = *std::max_element(w.p.begin(), w.p.end());
  report.max_principle_ok =
      report.min_pressure >= c.p_inf - 1e-9 && report.max_pressure <= 1e-9;

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(w.p), report};
}

Field CoupledSolver::memory_step(const Field& p_new, const SimulationState& prev) const {
  const double h = cfg_.step();
  Field r_new(prev.hydration.size());
  for (std::size_t i = 0; i < r_new.size(); ++i)
    r_new[i] = prev.hydration[i] +
               h * laws_->hydration_rate(p_new[i], prev.temperature[i], prev.hydration[i]);
  return r_new;
}

std::pair<Field, StepReport> CoupledSolver::temperature_step(
    const Field& p_new, const Field& r_new, const SimulationState& prev) const {
  const auto start = std::chrono::steady_clock::now();
  const auto& c = laws_->constants;
  const int n = grid_->node_count();
  const double h = cfg_.step();

  StepReport report;
  report.step = prev.index + 1;
  report.time = prev.time + h;

  // Kirchhoff variable of the new pressure for the convection flux.
  Field u(n);
  for (int i = 0; i < n; ++i) u[i] = kirchhoff_.forward(std::min(p_new[i], 0.0));

  std::vector<Mat2> thermal(grid_->element_count());
  std::vector<Mat2> conv_prefactor(grid_->element_count());
  double max_peclet = 0.0;
  const double hx = grid_->hx();
  for (int e = 0; e < grid_->element_count(); ++e) {
    const double p_e = grid_->element_value(prev.pressure, e);
    const double th_e = grid_->element_value(prev.temperature, e);
    const double r_e = grid_->element_value(prev.hydration, e);
    thermal[e] = provider_->thermal_tensor(e, p_e, th_e, r_e);
    const Mat2 pe = provider_->pressure_prefactor(e, r_e, th_e);
    conv_prefactor[e] = pe.scaled(c.c_w);
    const auto g = grid_->element_gradient(u, e);
    const auto flux = pe.apply(g[0], g[1]);
    const double speed = c.c_w * std::hypot(flux[0], flux[1]);
    max_peclet = std::max(max_peclet, speed * hx / laws_->conductivity.lower);
  }
  report.max_element_peclet = max_peclet;
  if (max_peclet > 2.0)
    throw SolverError("temperature step: element Peclet number " +
                      std::to_string(max_peclet) +
                      " exceeds 2; refine the mesh or reduce the time step");

  const SparseOperator diffusion = assemble_diffusion_tensor(*grid_, thermal);
  const SparseOperator convection = assemble_flux_convection(*grid_, conv_prefactor, u);

  // Lumped heat-capacity masses at the new and old levels.
  Field mass_new(n), mass_old(n);
  for (int i = 0; i < n; ++i) {
    const double phi_new = laws_->porosity.cement(r_new[i]);
    const double phi_old = laws_->porosity.cement(prev.hydration[i]);
    const double b_new = c.rho_w * (mass_cement_[i] * phi_new + mass_aggregate_[i] * laws_->porosity.aggregate) *
                         laws_->saturation.value(p_new[i]);
    const double b_old = c.rho_w * (mass_cement_[i] * phi_old + mass_aggregate_[i] * laws_->porosity.aggregate) *
                         laws_->saturation.value(prev.pressure[i]);
    const double sig_new = mass_cement_[i] * c.rho_sc * c.c_sc * (1.0 - phi_new) +
                           mass_aggregate_[i] * c.rho_sa * c.c_sa * (1.0 - laws_->porosity.aggregate);
    const double sig_old = mass_cement_[i] * c.rho_sc * c.c_sc * (1.0 - phi_old) +
                           mass_aggregate_[i] * c.rho_sa * c.c_sa * (1.0 - laws_->porosity.aggregate);
    mass_new[i] = (c.c_w * b_new + sig_new) / h;
    mass_old[i] = (c.c_w * b_old + sig_old) / h;
  }

  // Robin heat exchange and the boundary moisture coupling c_w beta_e (p - p_inf).
  Field robin_diag(n, 0.0), robin_load(n, 0.0), coupling_diag(n, 0.0);
  {
    const Field bm = boundary_lumped_mass(*grid_);
    for (int i = 0; i < n; ++i) {
      robin_diag[i] = c.alpha_e * bm[i];
      robin_load[i] = c.alpha_e * bm[i] * c.theta_inf;
      coupling_diag[i] = c.c_w * c.beta_e * bm[i] * (p_new[i] - c.p_inf);
    }
  }

  Field system_diag(n);
  for (int i = 0; i < n; ++i)
    system_diag[i] = mass_new[i] + robin_diag[i] + coupling_diag[i];
  const SparseOperator diag_op = diagonal_operator(system_diag);
  const SparseOperator system =
      SparseOperator::sum({&diffusion, &convection, &diag_op});

  Field rhs(n);
  for (int i = 0; i < n; ++i) {
    const double f = laws_->hydration_rate(p_new[i], prev.temperature[i], prev.hydration[i]);
    rhs[i] = mass_old[i] * prev.temperature[i] + robin_load[i] +
             c.alpha_2 * mass_cement_[i] * f;
  }

  SolveResult sol = solve_general(system, rhs, cfg_.linear_tolerance);
  report.temperature_residual = sol.relative_residual;
  report.converged = sol.converged;

  report.min_temperature = *std::min_element(sol.x.begin(), sol.x.end());
  report.max_temperature = *std::max_element(sol.x.begin(), sol.x.end());
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(sol.x), report};
}

Trajectory CoupledSolver::run(const Field& p0, const Field& theta0, int n_steps) const {
  const auto& c = laws_->constants;
  const int n = grid_->node_count();
  if (static_cast<int>(p0.size()) != n || static_cast<int>(theta0.size()) != n)
    throw ConfigError("run_simulation: initial field size mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(p0[i] > c.p_inf) || !(p0[i] <= 0.0))
      throw ValidationError("run_simulation: initial pressure must satisfy p_inf < p0 <= 0");
    if (!std::isfinite(theta0[i]))
      throw ValidationError("run_simulation: initial temperature must be finite");
  }
  if (n_steps < 0 || n_steps > cfg_.steps)
    throw ConfigError("run_simulation: step count out of range");

  Trajectory traj;
  traj.grid = grid_;
  traj.step_size = cfg_.step();
  traj.mass_cement = mass_cement_;
  traj.mass_aggregate = mass_aggregate_;
  traj.times.push_back(0.0);
  traj.pressure.push_back(p0);
  traj.temperature.push_back(theta0);
  traj.hydration.emplace_back(n, 0.0);

  SimulationState state;
  state.pressure = p0;
  state.temperature = theta0;
  state.hydration.assign(n, 0.0);

  for (int step = 1; step <= n_steps; ++step) {
    try {
      auto [p_new, p_report] = pressure_step(state);
      Field r_new = memory_step(p_new, state);
      auto [theta_new, t_report] = temperature_step(p_new, r_new, state);

      StepReport report = p_report;
      report.temperature_residual = t_report.temperature_residual;
      report.max_element_peclet = t_report.max_element_peclet;
      report.min_temperature = t_report.min_temperature;
      report.max_temperature = t_report.max_temperature;
      report.wall_seconds += t_report.wall_seconds;
      report.min_hydration = *std::min_element(r_new.begin(), r_new.end());
      report.max_hydration = *std::max_element(r_new.begin(), r_new.end());
      const double t_i = step * cfg_.step();
      report.memory_bounds_ok = true;
      for (int i = 0; i < n; ++i) {
        if (r_new[i] < state.hydration[i] - 1e-14 ||
            r_new[i] > laws_->hydration.rate_bound * t_i * (1.0 + 1e-12) + 1e-300) {
          report.memory_bounds_ok = false;
          break;
        }
      }

      state.index = step;
      state.time = t_i;
      state.pressure = std::move(p_new);
      state.hydration = std::move(r_new);
      state.temperature = std::move(theta_new);

      traj.times.push_back(state.time);
      traj.pressure.push_back(state.pressure);
      traj.temperature.push_back(state.temperature);
      traj.hydration.push_back(state.hydration);
      traj.reports.push_back(report);
    } catch (const SolverError& err) {
      traj.aborted = true;
      traj.abort_reason = err.what();
      break;
    }
  }
  return traj;
}

}  // namespace hygrohom
