#include "core/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"

namespace hygrohom {

namespace {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// C^1 smoothstep on [0, 1].
double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

double SaturationLaw::value(double p) const {
  const double span = max_saturation - residual;
  double vg;
  if (p < 0.0) {
    const double t = -p / pressure_scale;
    const double m = 1.0 - 1.0 / exponent;
    vg = residual + span * std::pow(1.0 + std::pow(t, exponent), -m);
  } else {
    vg = max_saturation;
  }
  const double lg = residual + span * logistic((p - logistic_center) / logistic_scale);
  return (1.0 - logistic_weight) * vg + logistic_weight * lg;
}

double SaturationLaw::derivative(double p) const {
  const double span = max_saturation - residual;
  double dvg = 0.0;
  if (p < 0.0) {
    const double t = -p / pressure_scale;
    const double m = 1.0 - 1.0 / exponent;
    const double tn = std::pow(t, exponent);
    dvg = span * m * exponent * std::pow(t, exponent - 1.0) *
          std::pow(1.0 + tn, -m - 1.0) / pressure_scale;
  }
  const double e = logistic((p - logistic_center) / logistic_scale);
  const double dlg = span * e * (1.0 - e) / logistic_scale;
  return (1.0 - logistic_weight) * dvg + logistic_weight * dlg;
}

void SaturationLaw::finalize() {
  if (derivative_bound > 0.0) return;
  // Numerical sup of the van Genuchten branch plus the analytic logistic
  // bound, with a small safety factor.
  double vg_max = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double p = -pressure_scale * 1e-3 * std::pow(1.004, k);
    const double t = -p / pressure_scale;
    if (t > 1e3) break;
    const double m = 1.0 - 1.0 / exponent;
    const double tn = std::pow(t, exponent);
    const double d = m * exponent * std::pow(t, exponent - 1.0) * std::pow(1.0 + tn, -m - 1.0) /
                     pressure_scale;
    vg_max = std::max(vg_max, d);
  }
  const double span = max_saturation - residual;
  derivative_bound = 1.02 * ((1.0 - logistic_weight) * span * vg_max +
                             logistic_weight * span / (4.0 * logistic_scale));
}

double RelativePermeabilityLaw::value(double s) const {
  const double t = std::clamp(s / max_saturation, 0.0, 1.0);
  return floor + (1.0 - floor) * std::pow(t, exponent);
}

double IntrinsicPermeabilityLaw::cement(double r) const {
  return cement_min + (cement_max - cement_min) * std::exp(-cement_decay * std::max(0.0, r));
}

double ViscosityLaw::value(double theta) const {
  const double raw = reference * (1.0 - slope * (theta - theta_ref));
  return std::clamp(raw, lower, upper);
}

double ThermalConductivityLaw::cement(double s_norm, double theta, double r) const {
  const double raw = cement_base + cement_sat_coeff * s_norm +
                     cement_r_coeff * std::min(r, 1.0) +
                     cement_theta_coeff * (theta - theta_ref);
  const double margin = 1e-6 * (upper - lower);
  return std::clamp(raw, lower + margin, upper - margin);
}

double ThermalConductivityLaw::aggregate(double s_norm, double theta) const {
  const double raw = aggregate_base + aggregate_sat_coeff * s_norm +
                     aggregate_theta_coeff * (theta - theta_ref);
  const double margin = 1e-6 * (upper - lower);
  return std::clamp(raw, lower + margin, upper - margin);
}

double PorosityLaw::cement(double r) const {
  return phi_min + (phi_max - phi_min) * std::exp(-decay * std::max(0.0, r));
}

void PorosityLaw::finalize() {
  if (lipschitz > 0.0) return;
  lipschitz = 1.02 * (phi_max - phi_min) * decay;
  if (lipschitz <= 0.0) lipschitz = 1e-12;  // constant porosity still declares C_phi > 0
}

double HydrationLaw::pressure_ramp(double p) const {
  if (p <= p_inf) return 0.0;
  const double width = ramp_width * std::abs(p_inf);
  return smoothstep((p - p_inf) / width);
}

double HydrationLaw::value(double p, double theta, double r) const {
  double ramp = pressure_ramp(p);
  if (ramp == 0.0) return 0.0;
  if (window_width > 0.0) {
    const double t = (p - window_center) / window_width;
    ramp *= std::exp(-t * t);
  }
  const double g_theta = logistic((theta - theta_mid) / theta_scale);
  double shape = 1.0;
  if (burst_knee > 0.0) {
    shape = burst_tail + (1.0 - burst_tail) * std::max(0.0, 1.0 - r / burst_knee);
  } else if (r_max > 0.0) {
    shape = std::max(0.0, 1.0 - r / r_max);
  }
  return rate_bound * ramp * g_theta * shape;
}

void MaterialLaws::finalize() {
  saturation.finalize();
  porosity.finalize();
  rel_perm.max_saturation = saturation.max_saturation;
  hydration.p_inf = constants.p_inf;
}

double MaterialLaws::moisture_content(Phase phase, double p, double r) const {
  const double phi = phase == Phase::cement ? porosity.cement(r) : porosity.aggregate;
  return constants.rho_w * phi * saturation.value(p);
}

double MaterialLaws::solid_heat_capacity(Phase phase, double r) const {
  if (phase == Phase::cement)
    return constants.rho_sc * constants.c_sc * (1.0 - porosity.cement(r));
  return constants.rho_sa * constants.c_sa * (1.0 - porosity.aggregate);
}

double MaterialLaws::mobility(Phase phase, double p, double theta, double r) const {
  const double k = phase == Phase::cement ? permeability.cement(r) : permeability.aggregate;
  return constants.rho_w * rel_perm.value(saturation.value(p)) / viscosity.value(theta) * k;
}

double MaterialLaws::thermal_conductivity(Phase phase, double p, double theta,
                                          double r) const {
  const double s_norm = saturation.value(p) / saturation.max_saturation;
  if (phase == Phase::cement) return conductivity.cement(s_norm, theta, r);
  return conductivity.aggregate(s_norm, theta);
}

double MaterialLaws::hydration_rate(double p, double theta, double r) const {
  return hydration.value(p, theta, r);
}

double MaterialLaws::theta_potential(double p) const {
  // Composite Simpson on [0, p]; the integrand S'(z) z is smooth.
  if (p == 0.0) return 0.0;
  const int n = 64;  // per call; doubled once for a cheap error estimate
  auto integrate = [this, p](int segments) {
    const double h = p / segments;
    double s = 0.0;
    for (int k = 0; k < segments; ++k) {
      const double a = k * h, b = a + h, mid = a + 0.5 * h;
      s += (h / 6.0) * (saturation.derivative(a) * a + 4.0 * saturation.derivative(mid) * mid +
                        saturation.derivative(b) * b);
    }
    return s;
  };
  const double coarse = integrate(n);
  const double fine = integrate(2 * n);
  return fine + (fine - coarse) / 15.0;
}

double MaterialLaws::truncated_perm_lower() const {
  return rel_perm.value(saturation.value(constants.p_inf));
}

double MaterialLaws::truncated_perm_upper() const {
  return rel_perm.value(saturation.max_saturation);
}

namespace {

struct CheckAccumulator {
  ValidationReport report;

  void add(const std::string& assumption, const std::string& name, bool passed,
           double margin, const std::string& detail = "") {
    report.checks.push_back({assumption, name, passed, margin, detail});
  }
};

}  // namespace

ValidationReport validate_assumptions(const MaterialLaws& laws, int n_samples) {
  if (n_samples < 100) throw ConfigError("validate_assumptions: n_samples must be >= 100");
  CheckAccumulator acc;
  const auto& c = laws.constants;
  const double pa = std::abs(c.p_inf);

  // Sampling ranges covering (and exceeding) the admissible state box.
  auto sample = [n_samples](double lo, double hi, int k) {
    return lo + (hi - lo) * (static_cast<double>(k) / (n_samples - 1));
  };
  const double p_lo = c.p_inf - pa, p_hi = 0.5 * pa;
  const double th_lo = c.theta_inf - 60.0, th_hi = c.theta_inf + 120.0;
  const double r_hi = 1.0;

  // (i) saturation bounds and monotonicity
  {
    double worst_pos = 1e300, worst_up = 1e300, worst_dpos = 1e300, worst_dup = 1e300;
    for (int k = 0; k < n_samples; ++k) {
      const double p = sample(p_lo, p_hi, k);
      const double s = laws.saturation.value(p);
      const double ds = laws.saturation.derivative(p);
      worst_pos = std::min(worst_pos, s);
      worst_up = std::min(worst_up, laws.saturation.max_saturation - s);
      worst_dpos = std::min(worst_dpos, ds);
      worst_dup = std::min(worst_dup, laws.saturation.derivative_bound - ds);
    }
    acc.add("(i)", "saturation positive", worst_pos > 0, worst_pos);
    acc.add("(i)", "saturation <= C_s", worst_up >= 0, worst_up);
    acc.add("(i)", "saturation derivative positive", worst_dpos > 0, worst_dpos);
    acc.add("(i)", "saturation derivative <= S_L", worst_dup >= 0, worst_dup);
  }

  // (ii) conductivity-type bounds
  {
    double worst_lo = 1e300, worst_hi = 1e300;
    for (int k = 0; k < n_samples; ++k) {
      const double r = sample(0.0, r_hi, k);
      const double kc = laws.permeability.cement(r);
      worst_lo = std::min(worst_lo, kc - laws.permeability.cement_min * (1.0 - 1e-12));
      worst_hi = std::min(worst_hi, laws.permeability.cement_max * (1.0 + 1e-12) - kc);
    }
    acc.add("(ii)", "k_c within [k1, k2]", worst_lo >= 0 && worst_hi >= 0,
            std::min(worst_lo, worst_hi));

    double worst_pos = 1e300, worst_mono = 1e300;
    double prev = 0.0;
    for (int k = 0; k < n_samples; ++k) {
      const double s = sample(0.0, laws.saturation.max_saturation, k);
      const double v = laws.rel_perm.value(s);
      worst_pos = std::min(worst_pos, v);
      if (k > 0) worst_mono = std::min(worst_mono, v - prev);
      prev = v;
    }
    acc.add("(ii)", "k_R positive on [0, C_s]", worst_pos > 0, worst_pos);
    acc.add("(ii)", "k_R strictly increasing", worst_mono > 0, worst_mono);

    double worst_mu_lo = 1e300, worst_mu_hi = 1e300;
    for (int k = 0; k < n_samples; ++k) {
      const double mu = laws.viscosity.value(sample(th_lo, th_hi, k));
      worst_mu_lo = std::min(worst_mu_lo, mu - laws.viscosity.lower);
      worst_mu_hi = std::min(worst_mu_hi, laws.viscosity.upper - mu);
    }
    acc.add("(ii)", "viscosity within [mu1, mu2]", worst_mu_lo >= 0 && worst_mu_hi >= 0,
            std::min(worst_mu_lo, worst_mu_hi));

    double worst_l = 1e300;
    const int grid = std::max(5, static_cast<int>(std::cbrt(n_samples)));
    for (int a = 0; a < grid; ++a)
      for (int b = 0; b < grid; ++b)
        for (int d = 0; d < grid; ++d) {
          const double p = p_lo + (p_hi - p_lo) * a / (grid - 1);
          const double th = th_lo + (th_hi - th_lo) * b / (grid - 1);
          const double r = r_hi * d / (grid - 1);
          const double lc = laws.thermal_conductivity(Phase::cement, p, th, r);
          const double la = laws.thermal_conductivity(Phase::aggregate, p, th, r);
          worst_l = std::min({worst_l, lc - laws.conductivity.lower,
                              laws.conductivity.upper - lc, la - laws.conductivity.lower,
                              laws.conductivity.upper - la});
        }
    acc.add("(ii)", "conductivities strictly within (lambda1, lambda2)", worst_l > 0, worst_l);
  }

  // (iii) porosity Lipschitz and bounds
  {
    double worst_lip = 1e300, worst_lo = 1e300, worst_hi = 1e300;
    for (int k = 0; k + 1 < n_samples; ++k) {
      const double r1 = sample(0.0, r_hi, k);
      const double r2 = sample(0.0, r_hi, k + 1);
      const double lhs = std::abs(laws.porosity.cement(r1) - laws.porosity.cement(r2));
      worst_lip = std::min(worst_lip,
                           laws.porosity.lipschitz * std::abs(r1 - r2) - lhs + 1e-15);
      const double phi = laws.porosity.cement(r1);
      worst_lo = std::min(worst_lo, phi - laws.porosity.phi_min * (1.0 - 1e-12));
      worst_hi = std::min(worst_hi, laws.porosity.phi_max * (1.0 + 1e-12) - phi);
    }
    acc.add("(iii)", "porosity Lipschitz with C_phi", worst_lip >= 0, worst_lip);
    acc.add("(iii)", "porosity within [phi1, phi2]", worst_lo >= 0 && worst_hi >= 0,
            std::min(worst_lo, worst_hi));
  }

  // (iv) hydration rate bounds and cutoff
  {
    double worst_lo = 1e300, worst_hi = 1e300, worst_cut = 0.0;
    const int grid = std::max(5, static_cast<int>(std::cbrt(n_samples)));
    for (int a = 0; a < grid; ++a)
      for (int b = 0; b < grid; ++b)
        for (int d = 0; d < grid; ++d) {
          const double p = p_lo + (p_hi - p_lo) * a / (grid - 1);
          const double th = th_lo + (th_hi - th_lo) * b / (grid - 1);
          const double r = r_hi * d / (grid - 1);
          const double f = laws.hydration_rate(p, th, r);
          worst_lo = std::min(worst_lo, f);
          worst_hi = std::min(worst_hi, laws.hydration.rate_bound - f);
          if (p <= c.p_inf) worst_cut = std::max(worst_cut, std::abs(f));
        }
    acc.add("(iv)", "hydration rate in [0, C_f]", worst_lo >= 0 && worst_hi >= 0,
            std::min(worst_lo, worst_hi));
    acc.add("(iv)", "hydration rate vanishes for p <= p_inf", worst_cut == 0.0, -worst_cut);
  }

  // (v) constants
  acc.add("(v)", "alpha_e > 0", c.alpha_e > 0, c.alpha_e);
  acc.add("(v)", "beta_e > 0", c.beta_e > 0, c.beta_e);
  acc.add("(v)", "alpha1 < 0", c.alpha_1 < 0, -c.alpha_1);
  acc.add("(v)", "alpha2 > 0", c.alpha_2 > 0, c.alpha_2);
  acc.add("(v)", "p_inf < 0", c.p_inf < 0, -c.p_inf);
  acc.add("(v)", "theta_inf > 0", c.theta_inf > 0, c.theta_inf);
  {
    const double drying = c.alpha_1 + c.rho_w * laws.porosity.lipschitz *
                                          laws.saturation.max_saturation;
    acc.add("(v)", "drying condition alpha1 + rho_w C_phi C_s < 0", drying < 0, -drying);
  }

  acc.report.all_passed = true;
  for (const auto& check : acc.report.checks) acc.report.all_passed &= check.passed;
  return acc.report;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& check : checks) {
    os << (check.passed ? "[pass] " : "[FAIL] ") << check.assumption << " " << check.name
       << " (margin " << check.margin << ")";
    if (!check.detail.empty()) os << " " << check.detail;
    os << "\n";
  }
  os << (all_passed ? "all assumption checks passed" : "assumption checks FAILED") << "\n";
  return os.str();
}

std::string ValidationReport::to_json() const {
  std::ostringstream os;
  os << "{\"all_passed\":" << (all_passed ? "true" : "false") << ",\"checks\":[";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& ch = checks[i];
    os << (i ? "," : "") << "{\"assumption\":\"" << ch.assumption << "\",\"name\":\""
       << ch.name << "\",\"passed\":" << (ch.passed ? "true" : "false")
       << ",\"margin\":" << ch.margin << "}";
  }
  os << "]}";
  return os.str();
}

KirchhoffMap::KirchhoffMap(const MaterialLaws& laws) : laws_(&laws) {
  const double pa = std::abs(laws.constants.p_inf);
  p_inf_ = laws.constants.p_inf;
  p_hi_ = 0.05 * pa;
  k0_ = laws.truncated_perm_lower();
  k1_ = laws.truncated_perm_upper();

  const int n = 4096;
  dp_ = (p_hi_ - p_inf_) / n;
  kappa_.resize(n + 1);

  // kappa(p_inf) = -int_{p_inf}^{0} k~_r; accumulate from p_inf upward and
  // shift so that kappa(0) = 0.
  kappa_[0] = 0.0;
  for (int k = 0; k < n; ++k)
    kappa_[k + 1] = kappa_[k] + segment_integral(node_p(k), node_p(k + 1));
  // Locate kappa at p = 0 (exact node only if p_inf/dp is integral; integrate
  // the partial segment otherwise).
  const double idx = (0.0 - p_inf_) / dp_;
  const int k0 = std::min(static_cast<int>(idx), n - 1);
  const double kappa_zero = kappa_[k0] + segment_integral(node_p(k0), 0.0);
  for (auto& v : kappa_) v -= kappa_zero;
  kappa_inf_ = kappa_[0];
}

double KirchhoffMap::node_p(int k) const { return p_inf_ + k * dp_; }

double KirchhoffMap::segment_integral(double a, double b) const {
  // 5-point composite Simpson; segments are tiny, the integrand smooth.
  auto f = [this](double p) { return truncated_permeability(p); };
  const double h = (b - a) / 4.0;
  return (h / 3.0) * (f(a) + 4.0 * f(a + h) + 2.0 * f(a + 2 * h) + 4.0 * f(a + 3 * h) + f(b));
}

double KirchhoffMap::truncated_permeability(double p) const {
  if (p <= p_inf_) return k0_;
  return laws_->rel_perm.value(laws_->saturation.value(p));
}

double KirchhoffMap::forward(double p) const {
  if (p <= p_inf_) return kappa_inf_ + k0_ * (p - p_inf_);  // exact linear branch
  if (p > p_hi_)
    throw SolverError("kirchhoff_forward: pressure above tabulated range");
  const int k = std::min(static_cast<int>((p - p_inf_) / dp_),
                         static_cast<int>(kappa_.size()) - 2);
  return kappa_[k] + segment_integral(node_p(k), p);
}

double KirchhoffMap::inverse(double u) const {
  if (u <= kappa_inf_) return p_inf_ + (u - kappa_inf_) / k0_;
  if (u > kappa_.back())
    throw SolverError("kirchhoff_inverse: value above tabulated range");

  // Binary search for the segment, then safeguarded Newton.
  auto it = std::upper_bound(kappa_.begin(), kappa_.end(), u);
  int k = std::max(0, static_cast<int>(it - kappa_.begin()) - 1);
  double lo = node_p(k), hi = std::min(node_p(k + 1), p_hi_);
  double p = lo + (u - kappa_[k]) / std::max(truncated_permeability(lo), 1e-300) ;
  p = std::clamp(p, lo, hi);
  for (int iter = 0; iter < 50; ++iter) {
    const double val = forward(p) - u;
    if (std::abs(val) <= 1e-13 * std::max(1.0, std::abs(u))) return p;
    if (val > 0)
      hi = p;
    else
      lo = p;
    const double slope = truncated_permeability(p);
    double next = p - val / slope;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    p = next;
  }
  return p;
}

MaterialLaws default_material_laws() {
  MaterialLaws laws;
  laws.finalize();
  return laws;
}

}  // namespace hygrohom
