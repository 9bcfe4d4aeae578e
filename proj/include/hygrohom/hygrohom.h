/* hygrohom — coupled heat and moisture transport in periodic two-phase
 * porous media: cell-problem solvers, effective tensors, a semi-implicit
 * meso/macro time stepper, and convergence experiments.
 *
 * C interface: opaque context handles plus status codes. Bulk results
 * (snapshots, tables, sweep reports) are written as files into the output
 * directory named by the configuration; the structs below carry the compact
 * summaries a caller typically prints.
 */
#ifndef HYGROHOM_H
#define HYGROHOM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hh_context hh_context;

enum {
  HH_OK = 0,
  HH_ERROR_CONFIG = 1,
  HH_ERROR_VALIDATION = 2,
  HH_ERROR_SOLVER = 3,
  HH_ERROR_IO = 4,
  HH_ERROR_ARGUMENT = 5
};

enum { HH_MODE_MESO = 0, HH_MODE_MACRO = 1 };

const char* hh_version(void);

/* Parses and validates the JSON configuration (schema errors carry a
 * JSON-pointer style path). On success *out owns a new context. */
int hh_context_open(const char* config_path, hh_context** out);
int hh_context_open_json(const char* json_text, hh_context** out);
void hh_context_close(hh_context* ctx);

/* Message of the last failed call on this context ("" after success). The
 * pointer stays valid until the next API call on the same context. */
const char* hh_context_error(const hh_context* ctx);

/* Runs the assumption checks (i)-(v); HH_OK when all pass. The per-check
 * report is retrievable afterwards regardless of the outcome. */
int hh_validate(hh_context* ctx);
const char* hh_validation_summary(const hh_context* ctx);

typedef struct hh_cell_result {
  double chi_star;   /* cement volume fraction of the unit cell */
  double contrast;   /* queried phase contrast */
  double tensor[4];  /* normalized effective tensor, row-major 2x2 */
} hh_cell_result;

/* Builds the contrast tables (written as JSON + CSV artifacts) and answers a
 * direct cell solve at the queried contrast; contrast <= 0 queries 1. */
int hh_run_cell(hh_context* ctx, double contrast, hh_cell_result* out);

typedef struct hh_run_result {
  int steps_completed;
  int invariants_ok;
  double min_pressure, max_pressure;
  double min_temperature, max_temperature;
  double max_hydration;
  double worst_mass_balance;
} hh_run_result;

/* Full simulation (HH_MODE_MESO or HH_MODE_MACRO); snapshots and step
 * reports are written into the configured output directory. */
int hh_run_simulation(hh_context* ctx, int mode, hh_run_result* out);

/* Epsilon sweep: meso runs against the homogenized reference. Arrays receive
 * up to `capacity` entries; *count reports how many epsilons were measured. */
int hh_run_converge(hh_context* ctx, size_t capacity, double* epsilons,
                    double* error_pressure, double* error_temperature,
                    double* error_hydration, size_t* count);

/* Time-translation functionals E(tau) of the meso run. */
int hh_run_translate(hh_context* ctx, size_t capacity, double* taus,
                     double* e_pressure, double* e_temperature, double* e_hydration,
                     size_t* count);

#ifdef __cplusplus
}
#endif

#endif /* HYGROHOM_H */
