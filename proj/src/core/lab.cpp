#include "core/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "core/errors.hpp"

namespace hygrohom {

double InitialFieldSpec::operator()(double x, double y) const {
  double v = base;
  if (noise_cells > 0 && amplitude != 0.0) {
    auto cell = [this](double t) {
      int c = static_cast<int>(std::floor(t * noise_cells));
      return std::clamp(c, 0, noise_cells - 1);
    };
    const std::uint64_t index =
        static_cast<std::uint64_t>(cell(y)) * noise_cells + cell(x);
    v += amplitude * hash_noise(seed, index);
  }
  return v;
}

Field sample_nodal(const StructuredGrid& grid, const InitialFieldSpec& spec) {
  Field f(grid.node_count());
  for (int n = 0; n < grid.node_count(); ++n) {
    const auto xy = grid.node_position(n);
    f[n] = spec(xy[0], xy[1]);
  }
  return f;
}

namespace {

// Nodal restriction of a fine-grid field to the base grid.
Field restrict_field(const Field& fine, const StructuredGrid& fine_grid, int base) {
  const int stride = fine_grid.nx() / base;
  Field coarse(static_cast<std::size_t>(base + 1) * (base + 1));
  for (int j = 0; j <= base; ++j)
    for (int i = 0; i <= base; ++i)
      coarse[static_cast<std::size_t>(j) * (base + 1) + i] =
          fine[fine_grid.node_index(i * stride, j * stride)];
  return coarse;
}

}  // namespace

SpaceTimeDistance l2_distance_spacetime(const Trajectory& a, const Trajectory& b,
                                        int base_resolution) {
  if (!a.grid || !b.grid) throw ConfigError("distance: trajectory without grid");
  if (a.grid->nx() % base_resolution != 0 || b.grid->nx() % base_resolution != 0)
    throw ConfigError("distance: grids must be multiples of the base resolution");

  const int na = a.step_count(), nb = b.step_count();
  if (na < 1 || nb < 1) throw ConfigError("distance: empty trajectory");
  const int n = std::min(na, nb);
  if (na % n != 0 || nb % n != 0)
    throw ConfigError("distance: step counts must be nested");
  const int sa = na / n, sb = nb / n;
  const double dt = a.times.back() / n;
  if (std::abs(a.times.back() - b.times.back()) > 1e-9 * std::max(1.0, a.times.back()))
    throw ConfigError("distance: trajectories cover different time spans");

  StructuredGrid base(base_resolution, base_resolution, a.grid->lx(), a.grid->ly());
  SpaceTimeDistance d;
  for (int k = 1; k <= n; ++k) {
    const Field pa = restrict_field(a.pressure[k * sa], *a.grid, base_resolution);
    const Field pb = restrict_field(b.pressure[k * sb], *b.grid, base_resolution);
    const Field ta = restrict_field(a.temperature[k * sa], *a.grid, base_resolution);
    const Field tb = restrict_field(b.temperature[k * sb], *b.grid, base_resolution);
    const Field ra = restrict_field(a.hydration[k * sa], *a.grid, base_resolution);
    const Field rb = restrict_field(b.hydration[k * sb], *b.grid, base_resolution);
    Field dp(pa.size()), dth(pa.size()), dr(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      dp[i] = pa[i] - pb[i];
      dth[i] = ta[i] - tb[i];
      dr[i] = ra[i] - rb[i];
    }
    d.pressure += dt * l2_inner(base, dp, dp);
    d.temperature += dt * l2_inner(base, dth, dth);
    d.hydration += dt * l2_inner(base, dr, dr);
    const double bp = boundary_l2_norm(base, dp);
    const double bt = boundary_l2_norm(base, dth);
    d.boundary_pressure += dt * bp * bp;
    d.boundary_temperature += dt * bt * bt;
  }
  d.pressure = std::sqrt(d.pressure);
  d.temperature = std::sqrt(d.temperature);
  d.hydration = std::sqrt(d.hydration);
  d.boundary_pressure = std::sqrt(d.boundary_pressure);
  d.boundary_temperature = std::sqrt(d.boundary_temperature);
  return d;
}

ErrorReport run_epsilon_sweep(const EpsilonSweepConfig& cfg, const CellRaster& raster,
                              const MaterialLaws& laws) {
  if (cfg.epsilons.empty()) throw ConfigError("epsilon sweep: empty epsilon list");
  if (cfg.epsilons.size() != cfg.meso_resolutions.size())
    throw ConfigError("epsilon sweep: one meso resolution per epsilon required");
  for (std::size_t k = 0; k < cfg.epsilons.size(); ++k) {
    if (cfg.meso_resolutions[k] % cfg.base_resolution != 0)
      throw ConfigError("epsilon sweep: meso grid must be a multiple of the base grid");
  }
  if (cfg.macro_resolution % cfg.base_resolution != 0)
    throw ConfigError("epsilon sweep: macro grid must be a multiple of the base grid");

  // Contrast tables for the macro run, spanning the assumption-(ii) ranges.
  const auto moisture_grid =
      log_contrast_grid(laws.moisture_contrast_min(), laws.moisture_contrast_max());
  const auto thermal_grid =
      log_contrast_grid(laws.thermal_contrast_min(), laws.thermal_contrast_max());
  const ContrastTable moisture_table =
      ContrastTable::build(raster, moisture_grid, cfg.cell_resolution, cfg.threads);
  const ContrastTable thermal_table =
      ContrastTable::build(raster, thermal_grid, cfg.cell_resolution, cfg.threads);
  const double chi_star = volume_fraction(raster);

  StructuredGrid macro_grid(cfg.macro_resolution, cfg.macro_resolution);
  MacroProvider macro_provider(moisture_table, thermal_table, chi_star, laws);
  CoupledSolver macro_solver(macro_grid, laws, macro_provider, cfg.time);
  Trajectory macro = macro_solver.run(sample_nodal(macro_grid, cfg.initial_pressure),
                                      sample_nodal(macro_grid, cfg.initial_temperature),
                                      cfg.time.steps);
  if (macro.aborted) throw SolverError("epsilon sweep: macro run aborted: " + macro.abort_reason);

  ErrorReport report;
  std::vector<Trajectory> meso_runs(cfg.epsilons.size());

  int threads = cfg.threads;
  if (threads <= 0) {
    if (const char* env = std::getenv("HYGROHOM_THREADS"))
      threads = std::max(1, std::atoi(env));
    else
      threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min<int>(threads, static_cast<int>(cfg.epsilons.size()));

  std::atomic<std::size_t> next{0};
  std::vector<std::string> failures(cfg.epsilons.size());
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cfg.epsilons.size()) break;
      try {
        MesoTiling tiling(cfg.epsilons[k], raster, cfg.meso_resolutions[k]);
        StructuredGrid grid(cfg.meso_resolutions[k], cfg.meso_resolutions[k]);
        MesoProvider provider(tiling, laws);
        CoupledSolver solver(grid, laws, provider, cfg.time);
        meso_runs[k] = solver.run(sample_nodal(grid, cfg.initial_pressure),
                                  sample_nodal(grid, cfg.initial_temperature),
                                  cfg.time.steps);
        if (meso_runs[k].aborted) failures[k] = meso_runs[k].abort_reason;
      } catch (const std::exception& err) {
        failures[k] = err.what();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t k = 0; k < failures.size(); ++k)
    if (!failures[k].empty())
      throw SolverError("epsilon sweep: meso run for epsilon " +
                        std::to_string(cfg.epsilons[k]) + " failed: " + failures[k]);

  for (std::size_t k = 0; k < cfg.epsilons.size(); ++k) {
    const SpaceTimeDistance d =
        l2_distance_spacetime(meso_runs[k], macro, cfg.base_resolution);
    report.epsilons.push_back(cfg.epsilons[k]);
    report.error_pressure.push_back(d.pressure);
    report.error_temperature.push_back(d.temperature);
    report.error_hydration.push_back(d.hydration);
    report.boundary_error_pressure.push_back(d.boundary_pressure);
    report.boundary_error_temperature.push_back(d.boundary_temperature);
  }

  auto decreasing = [](const std::vector<double>& v) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
      if (v[k + 1] > v[k]) return false;
    return true;
  };
  report.decreasing_pressure = decreasing(report.error_pressure);
  report.decreasing_temperature = decreasing(report.error_temperature);
  return report;
}

AprioriMonitor check_apriori_bounds(const Trajectory& traj, const MaterialLaws& laws) {
  AprioriMonitor mon;
  if (!traj.grid) return mon;
  const auto& c = laws.constants;
  const StructuredGrid& grid = *traj.grid;
  const int n = grid.node_count();
  const int steps = traj.step_count();
  const double h = traj.step_size;

  const Field unit_weight(grid.element_count(), 1.0);
  const Field lumped = assemble_lumped_mass(grid, unit_weight);
  const Field bmass = boundary_lumped_mass(grid);
  const Field stiff_coeff(grid.element_count(), 1.0);
  const SparseOperator unit_stiffness = assemble_diffusion(grid, stiff_coeff);

  double theta0_max = 0.0;
  for (double v : traj.temperature[0]) theta0_max = std::max(theta0_max, std::abs(v));
  const double sigma_min =
      std::min(c.rho_sc * c.c_sc * (1.0 - laws.porosity.phi_max),
               c.rho_sa * c.c_sa * (1.0 - laws.porosity.aggregate));
  const double growth_rate = c.c_w * c.rho_w * laws.porosity.lipschitz *
                             laws.hydration.rate_bound * laws.saturation.max_saturation /
                             sigma_min;

  // Phase-split energy rho_w int (chi_c phi_c(r) + chi_a phi_a) Theta(p);
  // the dissipation and boundary quadratic terms are dropped from the left of
  // the discrete inequality, which only weakens it.
  const bool has_masses = static_cast<int>(traj.mass_cement.size()) == n;
  auto energy_of = [&](int step) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const double theta_pot = laws.theta_potential(traj.pressure[step][i]);
      const double mc = has_masses ? traj.mass_cement[i] : 0.0;
      const double ma = has_masses ? traj.mass_aggregate[i] : lumped[i];
      e += (mc * laws.porosity.cement(traj.hydration[step][i]) +
            ma * laws.porosity.aggregate) *
           theta_pot;
    }
    return c.rho_w * e;
  };

  double boundary_measure = 0.0;
  for (int i = 0; i < n; ++i) boundary_measure += bmass[i];

  double cumulative = 0.0;
  double budget = 0.0;
  mon.worst_max_principle_margin = 1e300;
  mon.worst_energy_margin = 1e300;

  for (int step = 0; step <= steps; ++step) {
    const Field& p = traj.pressure[step];
    const Field& th = traj.temperature[step];
    const Field& r = traj.hydration[step];

    mon.min_pressure.push_back(*std::min_element(p.begin(), p.end()));
    mon.max_pressure.push_back(*std::max_element(p.begin(), p.end()));
    double th_max = 0.0;
    for (double v : th) th_max = std::max(th_max, std::abs(v));
    mon.max_abs_temperature.push_back(th_max);
    mon.max_hydration.push_back(*std::max_element(r.begin(), r.end()));

    const double margin = std::min(mon.min_pressure.back() - (c.p_inf - 1e-9),
                                   1e-9 - mon.max_pressure.back());
    mon.worst_max_principle_margin = std::min(mon.worst_max_principle_margin, margin);
    if (margin < 0.0) mon.max_principle_ok = false;

    const double t = traj.times[step];
    const double envelope = std::max(theta0_max, std::abs(c.theta_inf)) *
                                std::exp(growth_rate * t) +
                            c.alpha_2 * laws.hydration.rate_bound * t / sigma_min;
    if (th_max > envelope * (1.0 + 1e-9)) mon.temperature_bound_ok = false;

    const double r_cap = laws.hydration.rate_bound * t;
    if (mon.max_hydration.back() > r_cap * (1.0 + 1e-12) + 1e-300)
      mon.memory_bounds_ok = false;
    if (step > 0) {
      for (int i = 0; i < n; ++i)
        if (traj.hydration[step][i] < traj.hydration[step - 1][i] - 1e-14) {
          mon.memory_bounds_ok = false;
          break;
        }
    }

    mon.energy.push_back(energy_of(step));
    if (step > 0) {
      const Field& pc = traj.pressure[step];
      Field kp = unit_stiffness.multiply(pc);
      cumulative += h * (dot(kp, pc) + l2_inner(grid, pc, pc));
      // budget terms evaluated discretely
      double source = 0.0;
      for (int i = 0; i < n; ++i) {
        const double f = laws.hydration_rate(pc[i], traj.temperature[step - 1][i],
                                             traj.hydration[step - 1][i]);
        const double theta_pot = laws.theta_potential(pc[i]);
        const double swp = laws.saturation.value(pc[i]) * pc[i];
        const double mc = has_masses ? traj.mass_cement[i] : lumped[i];
        source += mc * f *
                  (std::abs(c.alpha_1) * std::abs(pc[i]) +
                   c.rho_w * laws.porosity.lipschitz * std::abs(theta_pot - swp));
      }
      budget += h * (0.5 * c.beta_e * c.p_inf * c.p_inf * boundary_measure + source);
    }
    mon.cumulative_h1.push_back(cumulative);

    const double bound = mon.energy.front() + budget;
    const double scale = std::max({std::abs(bound), std::abs(mon.energy.back()), 1e-300});
    const double e_margin = (bound - mon.energy.back()) / scale;
    mon.worst_energy_margin = std::min(mon.worst_energy_margin, e_margin);
    if (e_margin < -1e-8) mon.energy_bound_ok = false;
  }
  return mon;
}

TranslationReport translation_estimate(const Trajectory& traj, const MaterialLaws& laws,
                                       const std::vector<double>& taus) {
  TranslationReport rep;
  if (!traj.grid) throw ConfigError("translation estimate: trajectory without grid");
  const StructuredGrid& grid = *traj.grid;
  const double h = traj.step_size;
  const int n_steps = traj.step_count();
  const int n = grid.node_count();

  for (double tau : taus) {
    const double ratio = tau / h;
    const int k = static_cast<int>(std::lround(ratio));
    if (k < 1 || std::abs(ratio - k) > 1e-9)
      throw ConfigError("translation estimate: tau must be a positive multiple of h");
    if (k > n_steps)
      throw ConfigError("translation estimate: tau exceeds the trajectory span");

    // Piecewise-constant interpolants: p(t) = p^i on ((i-1)h, ih], so the
    // integral over (0, T - tau] is the sum over i = 1 .. n - k.
    double ep = 0.0, eth = 0.0, er = 0.0;
    Field dp(n), dth(n), dr(n), sp(n);
    for (int i = 1; i + k <= n_steps; ++i) {
      const Field& p0 = traj.pressure[i];
      const Field& p1 = traj.pressure[i + k];
      for (int m = 0; m < n; ++m) {
        dp[m] = p1[m] - p0[m];
        sp[m] = laws.saturation.value(p1[m]) - laws.saturation.value(p0[m]);
        dth[m] = traj.temperature[i + k][m] - traj.temperature[i][m];
        dr[m] = traj.hydration[i + k][m] - traj.hydration[i][m];
      }
      ep += h * l2_inner(grid, sp, dp);
      eth += h * l2_inner(grid, dth, dth);
      er += h * l2_inner(grid, dr, dr);
    }
    rep.taus.push_back(tau);
    rep.e_pressure.push_back(ep);
    rep.e_temperature.push_back(eth);
    rep.e_hydration.push_back(er);
  }
  return rep;
}

OscillatingAverageReport oscillating_average_test(
    const CellRaster& raster, const std::vector<double>& epsilons,
    const std::function<double(double, double)>& probe) {
  OscillatingAverageReport rep;
  const double chi_star = volume_fraction(raster);
  const int m = raster.resolution();

  // 3-point Gauss nodes on (0,1)
  const double g1 = 0.5 - std::sqrt(3.0 / 20.0), g2 = 0.5, g3 = 0.5 + std::sqrt(3.0 / 20.0);
  const double w1 = 5.0 / 18.0, w2 = 8.0 / 18.0, w3 = w1;
  const double gp[3] = {g1, g2, g3};
  const double gw[3] = {w1, w2, w3};

  for (double eps : epsilons) {
    const double inv = 1.0 / eps;
    const int q = static_cast<int>(std::lround(inv));
    if (std::abs(inv - q) > 1e-9)
      throw ConfigError("oscillating average: 1/epsilon must be an integer");
    const int boxes = q * m;
    const double s = 1.0 / boxes;
    double weighted = 0.0, total = 0.0;
    for (int j = 0; j < boxes; ++j)
      for (int i = 0; i < boxes; ++i) {
        double box_integral = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            box_integral += gw[a] * gw[b] * probe((i + gp[a]) * s, (j + gp[b]) * s);
        box_integral *= s * s;
        total += box_integral;
        if (raster.at(i % m, j % m)) weighted += box_integral;
      }
    rep.epsilons.push_back(eps);
    rep.errors.push_back(std::abs(weighted - chi_star * total));
  }
  for (std::size_t k = 0; k + 1 < rep.errors.size(); ++k)
    rep.ratios.push_back(rep.errors[k] > 0 ? rep.errors[k + 1] / rep.errors[k] : 0.0);
  return rep;
}

SelfConvergenceResult timestep_self_convergence(const StructuredGrid& grid,
                                                const MaterialLaws& laws,
                                                const CoefficientProvider& provider,
                                                TimeStepConfig base,
                                                const std::vector<int>& step_counts,
                                                const Field& p0, const Field& theta0) {
  if (step_counts.size() < 2)
    throw ConfigError("self convergence: need at least two step counts");
  for (std::size_t k = 0; k + 1 < step_counts.size(); ++k)
    if (step_counts[k + 1] % step_counts[k] != 0 || step_counts[k + 1] <= step_counts[k])
      throw ConfigError("self convergence: step counts must be increasing and nested");

  std::vector<Trajectory> runs;
  for (int steps : step_counts) {
    TimeStepConfig cfg = base;
    cfg.steps = steps;
    CoupledSolver solver(grid, laws, provider, cfg);
    runs.push_back(solver.run(p0, theta0, steps));
    if (runs.back().aborted)
      throw SolverError("self convergence: run aborted: " + runs.back().abort_reason);
  }

  // Field scales from the finest run for relative combination.
  const Trajectory& finest = runs.back();
  auto traj_norm = [&](auto member) {
    double s = 0.0;
    const double dt = finest.times.back() / finest.step_count();
    for (int k = 1; k <= finest.step_count(); ++k) {
      const Field& f = (finest.*member)[k];
      s += dt * l2_inner(*finest.grid, f, f);
    }
    return std::sqrt(s);
  };
  const double scale_p = traj_norm(&Trajectory::pressure);
  const double scale_t = traj_norm(&Trajectory::temperature);
  const double scale_r = traj_norm(&Trajectory::hydration);

  SelfConvergenceResult res;
  res.step_counts = step_counts;
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    const SpaceTimeDistance d = l2_distance_spacetime(runs[k], runs[k + 1], grid.nx());
    res.pressure_errors.push_back(d.pressure);
    res.temperature_errors.push_back(d.temperature);
    res.hydration_errors.push_back(d.hydration);
    double combined = 0.0;
    if (scale_p > 0) combined += (d.pressure / scale_p) * (d.pressure / scale_p);
    if (scale_t > 0) combined += (d.temperature / scale_t) * (d.temperature / scale_t);
    if (scale_r > 0) combined += (d.hydration / scale_r) * (d.hydration / scale_r);
    res.pair_errors.push_back(std::sqrt(combined));
  }
  if (res.pair_errors.size() >= 2 && res.pair_errors[1] > 0.0)
    res.observed_order = std::log2(res.pair_errors[0] / res.pair_errors[1]);
  return res;
}

}  // namespace hygrohom
