/* msbif - mean-square stability and bifurcation analysis for Ito SDEs.
 *
 * C API over the analysis core. All functions return msbif_status; on any
 * failure a thread-local message is available from msbif_last_error().
 * Objects are opaque handles released with their matching *_free function.
 */
#ifndef MSBIF_H
#define MSBIF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum msbif_status {
  MSBIF_OK = 0,
  MSBIF_ERR_INVALID_ARGUMENT = 1,
  MSBIF_ERR_UNKNOWN_MODEL = 2,
  MSBIF_ERR_UNKNOWN_VARIANT = 3,
  MSBIF_ERR_SINGULAR_MATRIX = 4,
  MSBIF_ERR_NO_CONVERGENCE = 5,
  MSBIF_ERR_INCONSISTENT_SYMMETRY = 6,
  MSBIF_ERR_NOT_MEAN_SQUARE_STABLE = 7,
  MSBIF_ERR_MISSING_ANALYTIC_JACOBIAN = 8,
  MSBIF_ERR_MISSING_REMAINDER_META = 9,
  MSBIF_ERR_MISSING_INPUTS = 10,
  MSBIF_ERR_TOO_FEW_PATHS = 11,
  MSBIF_ERR_SCHEMA_MISMATCH = 12,
  MSBIF_ERR_IO = 13,
  MSBIF_ERR_INTERNAL = 99
} msbif_status;

typedef struct msbif_model msbif_model;
typedef struct msbif_reports msbif_reports;
typedef struct msbif_sweep_result msbif_sweep_result;

const char* msbif_version(void);

/* Message for the most recent failing call on this thread. */
const char* msbif_last_error(void);

/* --- models ------------------------------------------------------------- */

/* Built-in models: pitchfork (additive|linear|quadratic), fold and
 * transcritical (multiplicative|additive), cir, bistable2d, lorenz
 * (diagonal|nonlinear), allen_cahn (dim configurable, default 50).
 * variant NULL selects the model default; dim 0 keeps the default. */
msbif_status msbif_model_create(const char* name, const char* variant,
                                int dim, msbif_model** out);

/* {"model": ..., "variant": ..., "params": {...}, "d": ...}; unknown keys
 * are rejected. */
msbif_status msbif_model_create_from_json(const char* json_text,
                                          msbif_model** out);

msbif_status msbif_model_set_param(msbif_model* model, const char* name,
                                   double value);

int msbif_model_dim(const msbif_model* model);
int msbif_model_noise_dim(const msbif_model* model);

void msbif_model_free(msbif_model* model);

/* --- stability analysis -------------------------------------------------- */

typedef struct msbif_report_scalars {
  double det_lambda_max;
  double lambda_max_A;
  double beta_sq; /* NaN when the linearization is not mean-square stable */
  double mu;
  double dg_tensor_norm_sq;
  int det_stable;
  int linear_ms_stable;
  int nonlinear_ms_stable;
  int nonnormality_warning;
} msbif_report_scalars;

/* One report per equilibrium at the current parameter values. */
msbif_status msbif_analyze(const msbif_model* model, double delta1,
                           double delta2, msbif_reports** out);

int msbif_reports_count(const msbif_reports* reports);
msbif_status msbif_reports_scalars(const msbif_reports* reports, int index,
                                   msbif_report_scalars* out);
/* Writes the equilibrium point into x_star (capacity >= model dimension). */
msbif_status msbif_reports_equilibrium(const msbif_reports* reports, int index,
                                       double* x_star, size_t capacity);
msbif_status msbif_reports_branch_id(const msbif_reports* reports, int index,
                                     char* buffer, size_t capacity);
/* JSON array of reports; free with msbif_string_free. */
msbif_status msbif_reports_to_json(const msbif_reports* reports,
                                   char** out_json);
void msbif_reports_free(msbif_reports* reports);

/* --- parameter sweeps ----------------------------------------------------- */

msbif_status msbif_sweep_run(const msbif_model* model, const char* param_name,
                             double from, double to, int steps, double delta1,
                             double delta2, msbif_sweep_result** out);
msbif_status msbif_sweep_write_csv(const msbif_sweep_result* sweep,
                                   const char* path);
/* field: "lambda_max_A" or "mu"; JSON array of refined crossings. */
msbif_status msbif_sweep_crossings_json(const msbif_sweep_result* sweep,
                                        const char* field, char** out_json);
void msbif_sweep_free(msbif_sweep_result* sweep);

/* --- simulation ----------------------------------------------------------- */

typedef struct msbif_sim_options {
  double t_final;    /* default 100 */
  double dt;         /* default 0.01 */
  int n_paths;       /* default 5 */
  uint64_t seed;     /* default 0 */
  double radius;     /* initial ball radius around x0, default 1e-6 */
  int output_stride; /* steps between recorded samples, default 1 */
  int taming;        /* default 1 */
} msbif_sim_options;

void msbif_sim_options_init(msbif_sim_options* opts);

/* Tamed Euler-Maruyama ensemble written as paths.csv. x0 may be NULL, in
 * which case the equilibrium selected by `equilibrium_label` is used (NULL
 * picks the first stable equilibrium, else the first one). Honors the
 * MSBIF_THREADS environment variable; output is byte-identical for any
 * worker count. */
msbif_status msbif_simulate_to_csv(const msbif_model* model, const double* x0,
                                   const char* equilibrium_label,
                                   const msbif_sim_options* opts,
                                   const char* csv_path);

/* --- figures -------------------------------------------------------------- */

/* kind: "bifurcation", "paths", or NULL to infer from the CSV header. */
msbif_status msbif_render_svg(const char* csv_path, const char* kind,
                              const char* svg_path);

/* --- validation ----------------------------------------------------------- */

typedef void (*msbif_line_callback)(const char* line, void* user_data);

/* Runs the oracle suites (closed forms, moment-ODE vs Monte Carlo,
 * dissipative bounds, crossing locations); quick != 0 skips the 10^4-path
 * suites. Emits one line per check through cb; *n_failed receives the number
 * of failed checks. */
msbif_status msbif_validate(int quick, msbif_line_callback cb, void* user_data,
                            int* n_failed);

void msbif_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* MSBIF_H */
