// Command-line front end; talks to the toolkit exclusively through the
// public C API in hygrohom/hygrohom.h.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hygrohom/hygrohom.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitUsage = 64;

int exit_code_for(int status) {
  switch (status) {
    case HH_OK:
      return kExitOk;
    case HH_ERROR_CONFIG:
    case HH_ERROR_VALIDATION:
      return kExitValidation;
    default:
      return kExitSolver;
  }
}

struct ContextGuard {
  hh_context* ctx = nullptr;
  ~ContextGuard() { hh_context_close(ctx); }
};

int open_context(const std::string& config_path, ContextGuard& guard) {
  const int status = hh_context_open(config_path.c_str(), &guard.ctx);
  if (status != HH_OK)
    std::fprintf(stderr, "error: failed to load config %s (status %d)\n",
                 config_path.c_str(), status);
  return status;
}

void print_error(const hh_context* ctx) {
  std::fprintf(stderr, "error: %s\n", hh_context_error(ctx));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hygrohom: heat and moisture transport in periodic two-phase porous media"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::string config_path;
  double contrast = 0.0;

  auto add_config = [&config_path](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON configuration file")->required();
  };

  CLI::App* validate = app.add_subcommand("validate", "run assumption checks only");
  add_config(validate);
  CLI::App* cell = app.add_subcommand("cell", "effective tensors and contrast tables");
  add_config(cell);
  cell->add_option("--contrast", contrast, "phase contrast to query directly");
  CLI::App* meso = app.add_subcommand("meso", "run the epsilon-periodic simulation");
  add_config(meso);
  CLI::App* macro = app.add_subcommand("macro", "run the homogenized simulation");
  add_config(macro);
  CLI::App* converge = app.add_subcommand("converge", "epsilon sweep against the macro run");
  add_config(converge);
  CLI::App* translate = app.add_subcommand("translate", "time-translation functionals");
  add_config(translate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  ContextGuard guard;
  if (const int status = open_context(config_path, guard); status != HH_OK)
    return exit_code_for(status);
  hh_context* ctx = guard.ctx;

  if (validate->parsed()) {
    const int status = hh_validate(ctx);
    std::printf("%s", hh_validation_summary(ctx));
    if (status != HH_OK) print_error(ctx);
    return exit_code_for(status);
  }

  if (cell->parsed()) {
    hh_cell_result result{};
    const int status = hh_run_cell(ctx, contrast, &result);
    if (status != HH_OK) {
      print_error(ctx);
      return exit_code_for(status);
    }
    std::printf("chi_c* = %.12g\n", result.chi_star);
    std::printf("contrast = %.12g\n", result.contrast);
    std::printf("K* = [ %.12g  %.12g ]\n", result.tensor[0], result.tensor[1]);
    std::printf("     [ %.12g  %.12g ]\n", result.tensor[2], result.tensor[3]);
    return kExitOk;
  }

  if (meso->parsed() || macro->parsed()) {
    hh_run_result result{};
    const int mode = meso->parsed() ? HH_MODE_MESO : HH_MODE_MACRO;
    const int status = hh_run_simulation(ctx, mode, &result);
    if (status != HH_OK) {
      print_error(ctx);
      return exit_code_for(status);
    }
    std::printf("steps completed: %d\n", result.steps_completed);
    std::printf("pressure range:  [%.6g, %.6g]\n", result.min_pressure, result.max_pressure);
    std::printf("temperature:     [%.6g, %.6g]\n", result.min_temperature,
                result.max_temperature);
    std::printf("max hydration:   %.6g\n", result.max_hydration);
    std::printf("mass balance defect (worst): %.3g\n", result.worst_mass_balance);
    std::printf("invariants: %s\n", result.invariants_ok ? "ok" : "VIOLATED");
    return result.invariants_ok ? kExitOk : kExitSolver;
  }

  if (converge->parsed()) {
    std::vector<double> eps(32), ep(32), eth(32), er(32);
    size_t count = 0;
    const int status =
        hh_run_converge(ctx, eps.size(), eps.data(), ep.data(), eth.data(), er.data(), &count);
    if (status != HH_OK) {
      print_error(ctx);
      return exit_code_for(status);
    }
    std::printf("epsilon,error_p,error_theta,error_r\n");
    for (size_t k = 0; k < count && k < eps.size(); ++k)
      std::printf("%.6g,%.10g,%.10g,%.10g\n", eps[k], ep[k], eth[k], er[k]);
    return kExitOk;
  }

  if (translate->parsed()) {
    std::vector<double> taus(32), ep(32), eth(32), er(32);
    size_t count = 0;
    const int status = hh_run_translate(ctx, taus.size(), taus.data(), ep.data(), eth.data(),
                                        er.data(), &count);
    if (status != HH_OK) {
      print_error(ctx);
      return exit_code_for(status);
    }
    std::printf("tau,E_p,E_theta,E_r\n");
    for (size_t k = 0; k < count && k < taus.size(); ++k)
      std::printf("%.6g,%.10g,%.10g,%.10g\n", taus[k], ep[k], eth[k], er[k]);
    return kExitOk;
  }

  return kExitUsage;
}
