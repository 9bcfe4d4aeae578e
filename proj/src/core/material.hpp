#pragma once

#include <string>
#include <vector>

#include "core/microstructure.hpp"

namespace hygrohom {

// Constitutive laws and constants. Every law carries the declared bounds the
// assumption checks validate against; defaults are constructed so that the
// checks pass with visible margins.

// Degree of saturation S(p), a blend of a van Genuchten branch (capped at the
// maximum for p >= 0) and a logistic branch that keeps S' strictly positive
// everywhere.
struct SaturationLaw {
  double max_saturation = 1.0;   // C_s
  double residual = 0.05;        // lower bound of S
  double pressure_scale = 5e4;   // Pa; van Genuchten 1/beta
  double exponent = 2.0;         // van Genuchten n (m = 1 - 1/n)
  double logistic_weight = 0.02;
  double logistic_scale = 2e4;   // Pa
  double logistic_center = 0.0;  // Pa
  double derivative_bound = 0.0; // S_L; computed by finalize() when zero

  double value(double p) const;
  double derivative(double p) const;
  void finalize();
};

// Relative hydraulic conductivity k_R on [0, C_s]: positive, strictly
// increasing. Additive floor keeps strict monotonicity near zero saturation.
struct RelativePermeabilityLaw {
  double floor = 0.05;
  double exponent = 3.0;
  double max_saturation = 1.0;

  double value(double s) const;
};

// Intrinsic permeability: cement k_c(r) in [k1, k2] decreasing with
// hydration; aggregate constant.
struct IntrinsicPermeabilityLaw {
  double cement_min = 5e-13;  // k1, m^2
  double cement_max = 1.5e-12;
  double cement_decay = 8.0;
  double aggregate = 2e-12;  // k_a

  double cement(double r) const;
};

// Temperature-dependent kinematic viscosity, clamped linear.
struct ViscosityLaw {
  double reference = 1.0e-3;  // Pa s at theta_ref
  double theta_ref = 293.15;
  double slope = 0.02;  // relative decrease per K
  double lower = 2.0e-4;
  double upper = 3.0e-3;

  double value(double theta) const;
};

// Thermal conductivities, affine in normalized state, clamped strictly
// inside (lambda_1, lambda_2).
struct ThermalConductivityLaw {
  double cement_base = 1.0;
  double cement_sat_coeff = 0.3;
  double cement_r_coeff = 0.2;
  double cement_theta_coeff = -0.001;
  double aggregate_base = 1.8;
  double aggregate_sat_coeff = 0.2;
  double aggregate_theta_coeff = -0.001;
  double theta_ref = 293.15;
  double lower = 0.5;  // lambda_1
  double upper = 3.0;  // lambda_2

  double cement(double s_norm, double theta, double r) const;
  double aggregate(double s_norm, double theta) const;
};

// Cement porosity phi_c(r) = phi_min + (phi_max - phi_min) exp(-decay r).
struct PorosityLaw {
  double phi_min = 0.10;  // phi_1
  double phi_max = 0.16;  // phi_2
  double decay = 2.0;
  double aggregate = 0.04;   // phi_a
  double lipschitz = 0.0;    // C_phi; computed by finalize() when zero

  double cement(double r) const;
  void finalize();
};

// Hydration rate f(p, theta, r) = C_f * ramp_p(p) * g_theta(theta) * shape_r(r).
// ramp_p vanishes identically for p <= p_inf (assumption (iv) cutoff) and is 1
// for p >= (1 - ramp_width) * p_inf; an optional Gaussian window in p narrows
// the active pressure range on top of the ramp. shape_r is either a linear
// ramp-down at r_max or a burst profile (fast knee + slow tail).
struct HydrationLaw {
  double rate_bound = 1e-5;  // C_f, 1/s
  double ramp_width = 0.25;  // fraction of |p_inf|
  double window_center = 0.0;  // Pa; active when window_width > 0
  double window_width = 0.0;   // Pa
  double theta_mid = 285.0;
  double theta_scale = 8.0;
  double r_max = 0.5;       // <= 0 disables the r ramp
  double burst_knee = 0.0;  // > 0 enables the burst profile
  double burst_tail = 0.05;
  double p_inf = -1e5;  // wired from constants when the bundle is built

  double value(double p, double theta, double r) const;
  double pressure_ramp(double p) const;
};

struct PhysicalConstants {
  double rho_w = 1000.0;   // kg/m^3
  double c_w = 4186.0;     // J/(kg K)
  double rho_sc = 2300.0;  // cement solid
  double c_sc = 750.0;
  double rho_sa = 2650.0;  // aggregate solid
  double c_sa = 800.0;
  double alpha_e = 10.0;   // W/(m^2 K)
  double beta_e = 1e-8;    // s/m
  double alpha_1 = -200.0; // kg/m^3 per unit hydration, negative (water sink)
  double alpha_2 = 5e7;    // J/m^3 per unit hydration
  double p_inf = -1e5;     // Pa
  double theta_inf = 293.15;  // K
};

struct ValidationCheck {
  std::string assumption;  // "(i)".."(v)"
  std::string name;
  bool passed = false;
  double margin = 0.0;  // worst margin, positive means satisfied
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed = false;
  std::string summary() const;
  std::string to_json() const;
};

class KirchhoffMap;

// Bundle of all laws plus constants; immutable once validated.
class MaterialLaws {
 public:
  SaturationLaw saturation;
  RelativePermeabilityLaw rel_perm;
  IntrinsicPermeabilityLaw permeability;
  ViscosityLaw viscosity;
  ThermalConductivityLaw conductivity;
  PorosityLaw porosity;
  HydrationLaw hydration;
  PhysicalConstants constants;

  // Wires cross-law parameters (hydration cutoff) and derived bounds.
  void finalize();

  // Simplified-notation coefficients per phase.
  double moisture_content(Phase phase, double p, double r) const;       // b
  double solid_heat_capacity(Phase phase, double r) const;              // sigma
  double mobility(Phase phase, double p, double theta, double r) const; // a
  double thermal_conductivity(Phase phase, double p, double theta, double r) const;

  double hydration_rate(double p, double theta, double r) const;

  // Energy potential int_0^p S'(z) z dz, evaluated by composite quadrature.
  double theta_potential(double p) const;

  // Bounds used by tables and checks.
  double truncated_perm_lower() const;  // K0 = k_R(S(p_inf))
  double truncated_perm_upper() const;  // K1 = k_R(C_s)
  double moisture_contrast_min() const { return permeability.cement_min / permeability.aggregate; }
  double moisture_contrast_max() const { return permeability.cement_max / permeability.aggregate; }
  double thermal_contrast_min() const { return conductivity.lower / conductivity.upper; }
  double thermal_contrast_max() const { return conductivity.upper / conductivity.lower; }
};

// Sampled checks of assumptions (i)-(v). Necessary, not sufficient; the
// report lists every check with its worst margin.
ValidationReport validate_assumptions(const MaterialLaws& laws, int n_samples);

// Kirchhoff transformation machinery: truncated permeability, primitive
// kappa, and its inverse on a tabulated range.
class KirchhoffMap {
 public:
  explicit KirchhoffMap(const MaterialLaws& laws);

  double truncated_permeability(double p) const;  // k~_r
  double forward(double p) const;                 // kappa(p)
  double inverse(double u) const;                 // kappa^{-1}(u)

  double k_lower() const { return k0_; }
  double k_upper() const { return k1_; }
  double p_table_min() const { return p_inf_; }
  double p_table_max() const { return p_hi_; }
  double u_at_p_inf() const { return kappa_inf_; }
  double u_table_max() const { return kappa_.back(); }

 private:
  double node_p(int k) const;
  double segment_integral(double a, double b) const;

  const MaterialLaws* laws_;
  double p_inf_, p_hi_, dp_;
  double k0_, k1_;
  double kappa_inf_;
  std::vector<double> kappa_;  // kappa at uniform nodes on [p_inf, p_hi]
};

// Default law set used by fixtures and tests; satisfies (i)-(v) by design.
MaterialLaws default_material_laws();

}  // namespace hygrohom
