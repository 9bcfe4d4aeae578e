#include "hygrohom/hygrohom.h"

#include <memory>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/runner.hpp"

struct hh_context {
  std::unique_ptr<hygrohom::Toolkit> toolkit;
  std::string last_error;
  std::string validation_summary;
};

namespace {

int classify(const std::exception& err) {
  if (dynamic_cast<const hygrohom::ConfigError*>(&err)) return HH_ERROR_CONFIG;
  if (dynamic_cast<const hygrohom::ValidationError*>(&err)) return HH_ERROR_VALIDATION;
  if (dynamic_cast<const hygrohom::SolverError*>(&err)) return HH_ERROR_SOLVER;
  if (dynamic_cast<const hygrohom::IoError*>(&err)) return HH_ERROR_IO;
  return HH_ERROR_ARGUMENT;
}

template <typename Fn>
int guarded(hh_context* ctx, Fn&& fn) {
  if (!ctx) return HH_ERROR_ARGUMENT;
  try {
    ctx->last_error.clear();
    fn();
    return HH_OK;
  } catch (const std::exception& err) {
    ctx->last_error = err.what();
    return classify(err);
  }
}

int open_impl(hh_context** out, const char* text, bool is_path) {
  if (!out) return HH_ERROR_ARGUMENT;
  *out = nullptr;
  if (!text) return HH_ERROR_ARGUMENT;
  auto ctx = std::make_unique<hh_context>();
  try {
    hygrohom::RunConfig cfg =
        is_path ? hygrohom::parse_config(text) : hygrohom::parse_config_text(text);
    ctx->toolkit = std::make_unique<hygrohom::Toolkit>(std::move(cfg));
  } catch (const std::exception& err) {
    // The context is not returned; the caller only gets the status code.
    return classify(err);
  }
  *out = ctx.release();
  return HH_OK;
}

}  // namespace

extern "C" {

const char* hh_version(void) { return "0.1.0"; }

int hh_context_open(const char* config_path, hh_context** out) {
  return open_impl(out, config_path, true);
}

int hh_context_open_json(const char* json_text, hh_context** out) {
  return open_impl(out, json_text, false);
}

void hh_context_close(hh_context* ctx) { delete ctx; }

const char* hh_context_error(const hh_context* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

int hh_validate(hh_context* ctx) {
  return guarded(ctx, [ctx] {
    const hygrohom::ValidationReport report = ctx->toolkit->validate();
    ctx->validation_summary = report.summary();
    if (!report.all_passed) {
      std::string failed;
      for (const auto& check : report.checks)
        if (!check.passed)
          failed += (failed.empty() ? "" : "; ") + check.assumption + " " + check.name;
      throw hygrohom::ValidationError("assumption validation failed: " + failed);
    }
  });
}

const char* hh_validation_summary(const hh_context* ctx) {
  return ctx ? ctx->validation_summary.c_str() : "";
}

int hh_run_cell(hh_context* ctx, double contrast, hh_cell_result* out) {
  return guarded(ctx, [&] {
    if (!out) throw hygrohom::ConfigError("hh_run_cell: null result pointer");
    const hygrohom::CellSummary s = ctx->toolkit->run_cell(
        contrast > 0 ? std::optional<double>(contrast) : std::nullopt);
    out->chi_star = s.chi_star;
    out->contrast = s.queried_contrast;
    out->tensor[0] = s.normalized_tensor.a11;
    out->tensor[1] = s.normalized_tensor.a12;
    out->tensor[2] = s.normalized_tensor.a21;
    out->tensor[3] = s.normalized_tensor.a22;
  });
}

int hh_run_simulation(hh_context* ctx, int mode, hh_run_result* out) {
  return guarded(ctx, [&] {
    if (!out) throw hygrohom::ConfigError("hh_run_simulation: null result pointer");
    if (mode != HH_MODE_MESO && mode != HH_MODE_MACRO)
      throw hygrohom::ConfigError("hh_run_simulation: unknown mode");
    const hygrohom::RunSummary s = ctx->toolkit->run_simulation(
        mode == HH_MODE_MESO ? hygrohom::RunMode::meso : hygrohom::RunMode::macro);
    out->steps_completed = s.steps_completed;
    out->invariants_ok = s.invariants_ok ? 1 : 0;
    out->min_pressure = s.min_pressure;
    out->max_pressure = s.max_pressure;
    out->min_temperature = s.min_temperature;
    out->max_temperature = s.max_temperature;
    out->max_hydration = s.max_hydration;
    out->worst_mass_balance = s.worst_mass_balance;
  });
}

int hh_run_converge(hh_context* ctx, size_t capacity, double* epsilons,
                    double* error_pressure, double* error_temperature,
                    double* error_hydration, size_t* count) {
  return guarded(ctx, [&] {
    const hygrohom::ErrorReport report = ctx->toolkit->run_converge();
    const size_t n = report.epsilons.size();
    if (count) *count = n;
    for (size_t k = 0; k < n && k < capacity; ++k) {
      if (epsilons) epsilons[k] = report.epsilons[k];
      if (error_pressure) error_pressure[k] = report.error_pressure[k];
      if (error_temperature) error_temperature[k] = report.error_temperature[k];
      if (error_hydration) error_hydration[k] = report.error_hydration[k];
    }
  });
}

int hh_run_translate(hh_context* ctx, size_t capacity, double* taus, double* e_pressure,
                     double* e_temperature, double* e_hydration, size_t* count) {
  return guarded(ctx, [&] {
    const hygrohom::TranslationReport report = ctx->toolkit->run_translate();
    const size_t n = report.taus.size();
    if (count) *count = n;
    for (size_t k = 0; k < n && k < capacity; ++k) {
      if (taus) taus[k] = report.taus[k];
      if (e_pressure) e_pressure[k] = report.e_pressure[k];
      if (e_temperature) e_temperature[k] = report.e_temperature[k];
      if (e_hydration) e_hydration[k] = report.e_hydration[k];
    }
  });
}

}  // extern "C"
