/* vesd: consistent estimation of precision-matrix quadratic forms a' S^-1 a
 * in the p > n regime, via spectral-distribution recovery from residue-based
 * moment estimators.
 *
 * All functions returning int use the shared status codes below; on any
 * nonzero return the handle/string outputs are untouched and a description is
 * available from vesd_last_error() (thread-local).  Strings returned through
 * char** are heap-allocated and must be released with vesd_string_free();
 * double buffers with vesd_buffer_free().
 */
#ifndef VESD_H
#define VESD_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef VESD_API
#define VESD_API __attribute__((visibility("default")))
#endif

/* Status codes double as process exit codes in the bundled CLI. */
#define VESD_OK 0
#define VESD_EFAIL 1          /* unclassified failure */
#define VESD_EINVAL 2         /* invalid input (files, configs, dimensions) */
#define VESD_ENUMERIC 3       /* numerical degeneracy */
#define VESD_ESTALL 4         /* LP iteration cap exceeded */
#define VESD_EZERO 5          /* signal below detection threshold */

typedef struct vesd_matrix vesd_matrix;
typedef struct vesd_report vesd_report;

VESD_API const char* vesd_version(void);
VESD_API const char* vesd_last_error(void);

/* ---- data ------------------------------------------------------------- */

/* n observations (rows) of dimension p, row-major. */
VESD_API int vesd_matrix_create(const double* data, int64_t n, int64_t p,
                                vesd_matrix** out);
VESD_API int vesd_matrix_read_csv(const char* path, int has_header,
                                  vesd_matrix** out);
VESD_API int vesd_matrix_read_bin(const char* path, vesd_matrix** out);
VESD_API int vesd_matrix_write_bin(const vesd_matrix* m, const char* path);
VESD_API int64_t vesd_matrix_rows(const vesd_matrix* m);
VESD_API int64_t vesd_matrix_cols(const vesd_matrix* m);
VESD_API int vesd_matrix_get(const vesd_matrix* m, int64_t row, int64_t col,
                             double* out);
VESD_API void vesd_matrix_free(vesd_matrix* m);

/* Single row or column of numbers. */
VESD_API int vesd_vector_read_csv(const char* path, double** out, int64_t* len);
VESD_API void vesd_buffer_free(double* buf);

/* ---- estimation -------------------------------------------------------- */

/* config_json: single-run options, every key optional (NULL = defaults):
 *   {"k":4, "delta":0.01, "interval":[0.3,5.0] | "heuristic",
 *    "h":0.001 | "auto", "stabilized":true, "lp_iter_cap":20000}
 */

/* a' S^-1 a for a known direction (any nonzero a; rescaled internally). */
VESD_API int vesd_estimate_tau(const vesd_matrix* x, const double* a,
                               int64_t a_len, const char* config_json,
                               vesd_report** out);
/* Optimal Sharpe ratio mu' S^-1 mu with the mean direction estimated. */
VESD_API int vesd_estimate_sharpe(const vesd_matrix* x, const char* config_json,
                                  vesd_report** out);
/* Squared multiple correlation of y on the columns of x. */
VESD_API int vesd_estimate_mcc(const vesd_matrix* x, const double* y,
                               int64_t y_len, const char* config_json,
                               vesd_report** out);

VESD_API double vesd_report_estimate(const vesd_report* r);
VESD_API double vesd_report_raw_estimate(const vesd_report* r);
VESD_API double vesd_report_kappa(const vesd_report* r);
VESD_API double vesd_report_plugin(const vesd_report* r);
VESD_API double vesd_report_lp_residual(const vesd_report* r);
VESD_API int64_t vesd_report_n(const vesd_report* r);
VESD_API int64_t vesd_report_p(const vesd_report* r);
/* Full report as JSON; include_vesd adds the recovered grid masses. */
VESD_API int vesd_report_json(const vesd_report* r, int include_vesd,
                              char** out);
/* Recovered distribution as "grid_point,mass,cdf" CSV. */
VESD_API int vesd_report_cdf_csv(const vesd_report* r, char** out);
VESD_API void vesd_report_free(vesd_report* r);
VESD_API void vesd_string_free(char* s);

/* ---- degenerate-plug-in diagnostics ------------------------------------ */

/* In-sample R^2 through the Moore-Penrose inverse; requires p > n. */
VESD_API int vesd_pseudo_r2(const vesd_matrix* x, const double* y,
                            int64_t y_len, double* out);
/* a' S^+ a for the sample covariance of x. */
VESD_API int vesd_pinv_quadratic(const vesd_matrix* x, const double* a,
                                 int64_t a_len, double* out);

/* AR(1) sweep demonstrating the non-identifiability of the plug-in:
 * config {"p":200, "n":100, "rho":[0.3,...,0.7], "reps":10, "seed":0,
 * "vector_setting":"dense2"} (all optional); emits CSV rows
 * rho,rep,n,p,truth_tau,pinv_quadratic,pseudo_r2.  Requires p > n. */
VESD_API int vesd_diagnose_pinv_sweep(const char* config_json, char** csv_out);

/* ---- simulation -------------------------------------------------------- */

/* Batch config: {"jobs":1, "defaults":{...}, "scenarios":[{...}]}; scenario
 * keys: id, target (tau|sharpe|mcc), model, cov_case, vector_setting, n, cn,
 * reps, seed plus the single-run options; custom cases add sigma_csv and
 * vector / vector_csv.  jobs_override > 0 replaces the config's job count.
 * Outputs: bias/variance CSV, a JSON object mapping scenario id to its cell
 * log, and a JSON object mapping scenario id to wall seconds (timings are
 * reported only here, never inside result bytes). */
VESD_API int vesd_simulate(const char* config_json, int jobs_override,
                           char** results_csv, char** cell_logs_json,
                           char** cell_seconds_json);

/* ---- run records -------------------------------------------------------- */

/* 16-hex-digit hash of the canonicalized JSON text. */
VESD_API int vesd_config_hash(const char* config_json, char** out);
/* Render a run manifest; fields_json keys: command, argv, config_hash, seed,
 * jobs, ok, exit_code, error, artifacts, wall_time_sec, cell_wall_time_sec.
 * Library versions are filled in here. */
VESD_API int vesd_manifest_json(const char* fields_json, char** out);

#ifdef __cplusplus
}
#endif

#endif /* VESD_H */
