#include "core/config.hpp"

#include <cmath>
#include <fstream>

#include "core/errors.hpp"
#include "json.hpp"

namespace hygrohom {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config error at " + path + ": " + msg);
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "/" + key, "missing required key");
  }
  if (!j.at(key).is_number()) fail(path + "/" + key, "expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key,
            std::optional<int> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "/" + key, "missing required key");
  }
  if (!j.at(key).is_number_integer()) fail(path + "/" + key, "expected an integer");
  return j.at(key).get<int>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "/" + key, "missing required key");
  }
  if (!j.at(key).is_string()) fail(path + "/" + key, "expected a string");
  return j.at(key).get<std::string>();
}

UnitCellGeometry parse_geometry(const json& j, const std::string& path) {
  const std::string kind = get_string(j, path, "kind");
  if (kind == "disk_inclusion") {
    DiskInclusion g;
    g.radius = get_number(j, path, "radius");
    if (!(g.radius > 0.0) || !(g.radius < 0.5))
      fail(path + "/radius", "disk radius must lie in (0, 0.5)");
    return g;
  }
  if (kind == "laminate") {
    Laminate g;
    const std::string axis = get_string(j, path, "normal_axis", std::string("x"));
    if (axis == "x")
      g.normal_axis = 0;
    else if (axis == "y")
      g.normal_axis = 1;
    else
      fail(path + "/normal_axis", "expected \"x\" or \"y\"");
    g.cement_fraction = get_number(j, path, "cement_fraction");
    if (g.cement_fraction < 0.0 || g.cement_fraction > 1.0)
      fail(path + "/cement_fraction", "must lie in [0, 1]");
    return g;
  }
  if (kind == "checkerboard") return Checkerboard{};
  if (kind == "uniform") {
    UniformCell g;
    const std::string phase = get_string(j, path, "phase", std::string("c"));
    if (phase == "c")
      g.phase = Phase::cement;
    else if (phase == "a")
      g.phase = Phase::aggregate;
    else
      fail(path + "/phase", "expected \"a\" or \"c\"");
    return g;
  }
  if (kind == "raster_file") {
    RasterFile g;
    g.path = get_string(j, path, "path");
    return g;
  }
  fail(path + "/kind", "unknown geometry kind \"" + kind + "\"");
}

void parse_laws(const json& j, const std::string& path, MaterialLaws& laws) {
  if (j.contains("saturation")) {
    const json& s = j.at("saturation");
    const std::string p = path + "/saturation";
    auto& law = laws.saturation;
    law.max_saturation = get_number(s, p, "max_saturation", law.max_saturation);
    law.residual = get_number(s, p, "residual", law.residual);
    law.pressure_scale = get_number(s, p, "pressure_scale", law.pressure_scale);
    law.exponent = get_number(s, p, "exponent", law.exponent);
    law.logistic_weight = get_number(s, p, "logistic_weight", law.logistic_weight);
    law.logistic_scale = get_number(s, p, "logistic_scale", law.logistic_scale);
    law.logistic_center = get_number(s, p, "logistic_center", law.logistic_center);
    law.derivative_bound = get_number(s, p, "derivative_bound", 0.0);
    if (!(law.residual > 0.0) || !(law.residual < law.max_saturation))
      fail(p, "need 0 < residual < max_saturation");
    if (!(law.exponent > 1.0)) fail(p + "/exponent", "van Genuchten exponent must exceed 1");
  }
  if (j.contains("relative_permeability")) {
    const json& s = j.at("relative_permeability");
    const std::string p = path + "/relative_permeability";
    laws.rel_perm.floor = get_number(s, p, "floor", laws.rel_perm.floor);
    laws.rel_perm.exponent = get_number(s, p, "exponent", laws.rel_perm.exponent);
    if (!(laws.rel_perm.floor > 0.0) || laws.rel_perm.floor >= 1.0)
      fail(p + "/floor", "floor must lie in (0, 1)");
  }
  if (j.contains("permeability")) {
    const json& s = j.at("permeability");
    const std::string p = path + "/permeability";
    auto& law = laws.permeability;
    law.cement_min = get_number(s, p, "cement_min", law.cement_min);
    law.cement_max = get_number(s, p, "cement_max", law.cement_max);
    law.cement_decay = get_number(s, p, "cement_decay", law.cement_decay);
    law.aggregate = get_number(s, p, "aggregate", law.aggregate);
    if (!(law.cement_min > 0.0) || law.cement_max < law.cement_min)
      fail(p, "need 0 < cement_min <= cement_max");
    if (!(law.aggregate > 0.0)) fail(p + "/aggregate", "must be positive");
  }
  if (j.contains("viscosity")) {
    const json& s = j.at("viscosity");
    const std::string p = path + "/viscosity";
    auto& law = laws.viscosity;
    law.reference = get_number(s, p, "reference", law.reference);
    law.theta_ref = get_number(s, p, "theta_ref", law.theta_ref);
    law.slope = get_number(s, p, "slope", law.slope);
    law.lower = get_number(s, p, "lower", law.lower);
    law.upper = get_number(s, p, "upper", law.upper);
    if (!(law.lower > 0.0) || law.upper < law.lower) fail(p, "need 0 < lower <= upper");
  }
  if (j.contains("conductivity")) {
    const json& s = j.at("conductivity");
    const std::string p = path + "/conductivity";
    auto& law = laws.conductivity;
    law.cement_base = get_number(s, p, "cement_base", law.cement_base);
    law.cement_sat_coeff = get_number(s, p, "cement_sat_coeff", law.cement_sat_coeff);
    law.cement_r_coeff = get_number(s, p, "cement_r_coeff", law.cement_r_coeff);
    law.cement_theta_coeff = get_number(s, p, "cement_theta_coeff", law.cement_theta_coeff);
    law.aggregate_base = get_number(s, p, "aggregate_base", law.aggregate_base);
    law.aggregate_sat_coeff = get_number(s, p, "aggregate_sat_coeff", law.aggregate_sat_coeff);
    law.aggregate_theta_coeff =
        get_number(s, p, "aggregate_theta_coeff", law.aggregate_theta_coeff);
    law.theta_ref = get_number(s, p, "theta_ref", law.theta_ref);
    law.lower = get_number(s, p, "lower", law.lower);
    law.upper = get_number(s, p, "upper", law.upper);
    if (!(law.lower > 0.0) || law.upper <= law.lower) fail(p, "need 0 < lower < upper");
  }
  if (j.contains("porosity")) {
    const json& s = j.at("porosity");
    const std::string p = path + "/porosity";
    auto& law = laws.porosity;
    law.phi_min = get_number(s, p, "phi_min", law.phi_min);
    law.phi_max = get_number(s, p, "phi_max", law.phi_max);
    law.decay = get_number(s, p, "decay", law.decay);
    law.aggregate = get_number(s, p, "aggregate", law.aggregate);
    law.lipschitz = get_number(s, p, "lipschitz", 0.0);
    if (!(law.phi_min > 0.0) || law.phi_max < law.phi_min)
      fail(p, "need 0 < phi_min <= phi_max");
    if (!(law.aggregate > 0.0) || law.aggregate >= 1.0)
      fail(p + "/aggregate", "must lie in (0, 1)");
  }
  if (j.contains("hydration")) {
    const json& s = j.at("hydration");
    const std::string p = path + "/hydration";
    auto& law = laws.hydration;
    law.rate_bound = get_number(s, p, "rate_bound", law.rate_bound);
    law.ramp_width = get_number(s, p, "ramp_width", law.ramp_width);
    law.window_center = get_number(s, p, "window_center", law.window_center);
    law.window_width = get_number(s, p, "window_width", law.window_width);
    law.theta_mid = get_number(s, p, "theta_mid", law.theta_mid);
    law.theta_scale = get_number(s, p, "theta_scale", law.theta_scale);
    law.r_max = get_number(s, p, "r_max", law.r_max);
    law.burst_knee = get_number(s, p, "burst_knee", law.burst_knee);
    law.burst_tail = get_number(s, p, "burst_tail", law.burst_tail);
    if (law.rate_bound < 0.0) fail(p + "/rate_bound", "must be nonnegative");
    if (!(law.ramp_width > 0.0) || law.ramp_width > 1.0)
      fail(p + "/ramp_width", "must lie in (0, 1]");
  }
}

void parse_constants(const json& j, const std::string& path, PhysicalConstants& c) {
  c.rho_w = get_number(j, path, "rho_w", c.rho_w);
  c.c_w = get_number(j, path, "c_w", c.c_w);
  c.rho_sc = get_number(j, path, "rho_sc", c.rho_sc);
  c.c_sc = get_number(j, path, "c_sc", c.c_sc);
  c.rho_sa = get_number(j, path, "rho_sa", c.rho_sa);
  c.c_sa = get_number(j, path, "c_sa", c.c_sa);
  c.alpha_e = get_number(j, path, "alpha_e", c.alpha_e);
  c.beta_e = get_number(j, path, "beta_e", c.beta_e);
  c.alpha_1 = get_number(j, path, "alpha_1", c.alpha_1);
  c.alpha_2 = get_number(j, path, "alpha_2", c.alpha_2);
  c.p_inf = get_number(j, path, "p_inf", c.p_inf);
  c.theta_inf = get_number(j, path, "theta_inf", c.theta_inf);
  // Sign structure of assumption (v); checked here so configs fail fast with
  // a precise path, and re-checked by validate_assumptions.
  if (!(c.p_inf < 0.0)) fail(path + "/p_inf", "assumption (v) requires p_inf < 0");
  if (!(c.theta_inf > 0.0)) fail(path + "/theta_inf", "assumption (v) requires theta_inf > 0");
  if (!(c.alpha_1 < 0.0)) fail(path + "/alpha_1", "assumption (v) requires alpha1 < 0");
  if (!(c.alpha_2 > 0.0)) fail(path + "/alpha_2", "assumption (v) requires alpha2 > 0");
  if (!(c.alpha_e > 0.0)) fail(path + "/alpha_e", "assumption (v) requires alpha_e > 0");
  if (!(c.beta_e > 0.0)) fail(path + "/beta_e", "assumption (v) requires beta_e > 0");
}

}  // namespace

InitialFieldSpec RunConfig::pressure_spec() const {
  return {initial_pressure, pressure_noise_amplitude, noise_cells, seed ^ 0x70ull};
}

InitialFieldSpec RunConfig::temperature_spec() const {
  return {initial_temperature, temperature_noise_amplitude, noise_cells, seed ^ 0x74ull};
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError("config parse error in " + origin + ": " + err.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  RunConfig cfg;
  cfg.source_text = j.dump();

  if (j.contains("geometry")) cfg.geometry = parse_geometry(j.at("geometry"), "/geometry");
  cfg.raster_resolution = get_int(j, "", "raster_resolution", 8);
  if (cfg.raster_resolution < 2) fail("/raster_resolution", "must be at least 2");

  if (j.contains("laws")) parse_laws(j.at("laws"), "/laws", cfg.laws);
  if (j.contains("constants")) parse_constants(j.at("constants"), "/constants", cfg.laws.constants);
  cfg.laws.finalize();

  if (j.contains("grid")) {
    cfg.grid_resolution = get_int(j.at("grid"), "/grid", "resolution", 32);
    if (cfg.grid_resolution < 2) fail("/grid/resolution", "must be at least 2");
  }

  if (j.contains("time")) {
    const json& t = j.at("time");
    cfg.time.final_time = get_number(t, "/time", "final_time", cfg.time.final_time);
    cfg.time.steps = get_int(t, "/time", "steps", cfg.time.steps);
    cfg.time.picard_tolerance =
        get_number(t, "/time", "picard_tolerance", cfg.time.picard_tolerance);
    cfg.time.picard_max_iterations =
        get_int(t, "/time", "picard_max_iterations", cfg.time.picard_max_iterations);
    cfg.time.picard_damping = get_number(t, "/time", "picard_damping", cfg.time.picard_damping);
    cfg.time.linear_tolerance =
        get_number(t, "/time", "linear_tolerance", cfg.time.linear_tolerance);
    if (!(cfg.time.final_time > 0.0)) fail("/time/final_time", "must be positive");
    if (cfg.time.steps < 1) fail("/time/steps", "must be at least 1");
    if (!(cfg.time.picard_tolerance > 0.0)) fail("/time/picard_tolerance", "must be positive");
    if (!(cfg.time.picard_damping > 0.0) || cfg.time.picard_damping > 1.0)
      fail("/time/picard_damping", "must lie in (0, 1]");
  }

  if (j.contains("initial")) {
    const json& init = j.at("initial");
    cfg.initial_pressure = get_number(init, "/initial", "pressure", cfg.initial_pressure);
    cfg.initial_temperature =
        get_number(init, "/initial", "temperature", cfg.initial_temperature);
    cfg.pressure_noise_amplitude =
        get_number(init, "/initial", "pressure_noise", 0.0);
    cfg.temperature_noise_amplitude =
        get_number(init, "/initial", "temperature_noise", 0.0);
    cfg.noise_cells = get_int(init, "/initial", "noise_cells", 0);
    const double p0_min = cfg.initial_pressure - std::abs(cfg.pressure_noise_amplitude);
    const double p0_max = cfg.initial_pressure + std::abs(cfg.pressure_noise_amplitude);
    if (!(p0_min > cfg.laws.constants.p_inf) || !(p0_max <= 0.0))
      fail("/initial/pressure", "initial pressure must satisfy p_inf < p0 <= 0");
  }

  cfg.epsilon = get_number(j, "", "epsilon", 0.25);
  if (j.contains("epsilon_list")) {
    if (!j.at("epsilon_list").is_array()) fail("/epsilon_list", "expected an array");
    for (const auto& e : j.at("epsilon_list")) {
      if (!e.is_number()) fail("/epsilon_list", "entries must be numbers");
      cfg.epsilon_list.push_back(e.get<double>());
    }
  }
  if (j.contains("meso_resolutions")) {
    if (!j.at("meso_resolutions").is_array()) fail("/meso_resolutions", "expected an array");
    for (const auto& e : j.at("meso_resolutions"))
      cfg.meso_resolutions.push_back(e.get<int>());
  }
  cfg.base_resolution = get_int(j, "", "base_resolution", 0);
  cfg.macro_resolution = get_int(j, "", "macro_resolution", 0);
  cfg.cell_resolution = get_int(j, "", "cell_resolution", 64);
  cfg.contrast_points_per_decade = get_int(j, "", "contrast_points_per_decade", 33);

  if (j.contains("translate")) {
    const json& t = j.at("translate");
    if (!t.contains("taus") || !t.at("taus").is_array())
      fail("/translate/taus", "expected an array of step multiples");
    for (const auto& v : t.at("taus")) cfg.translate_taus.push_back(v.get<double>());
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    cfg.output_directory = get_string(o, "/output", "directory", cfg.output_directory);
    cfg.snapshot_stride = get_int(o, "/output", "snapshot_stride", 0);
    cfg.snapshot_format = get_string(o, "/output", "format", cfg.snapshot_format);
    if (cfg.snapshot_format != "csv" && cfg.snapshot_format != "vtk" &&
        cfg.snapshot_format != "both")
      fail("/output/format", "expected \"csv\", \"vtk\" or \"both\"");
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.threads = get_int(j, "", "threads", 0);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.empty()) throw ConfigError("config parse error in " + path + ": empty file");
  return parse_config_text(text, path);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : cfg.source_text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace hygrohom
