/*
 * rmtfid: Monte Carlo fidelity amplitude and cross form-factor of a
 * Poissonian spectrum under a Gaussian random perturbation.
 *
 * Plain C interface over opaque handles. Every fallible call returns an
 * rmtfid_status; on failure rmtfid_last_error() describes what went wrong
 * (the message is thread-local and valid until the next failing call on the
 * same thread). Strings returned through char** must be released with
 * rmtfid_string_free.
 */
#ifndef RMTFID_H
#define RMTFID_H

#include <stddef.h>
#include <stdint.h>

#if defined(RMTFID_BUILDING_LIBRARY)
#define RMTFID_API __attribute__((visibility("default")))
#else
#define RMTFID_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rmtfid_status {
  RMTFID_OK = 0,
  RMTFID_ERR_CONFIG = 1,    /* invalid parameter, mismatched grids or dimensions */
  RMTFID_ERR_DOMAIN = 2,    /* argument outside a closed form's domain */
  RMTFID_ERR_NUMERICAL = 3, /* eigensolver failure */
  RMTFID_ERR_IO = 4,
  RMTFID_ERR_INTERNAL = 5
} rmtfid_status;

typedef enum rmtfid_format { RMTFID_FORMAT_CSV = 0, RMTFID_FORMAT_JSON = 1 } rmtfid_format;

typedef struct rmtfid_config rmtfid_config;
typedef struct rmtfid_run rmtfid_run;
typedef struct rmtfid_report rmtfid_report;

/* (completed, total, user) after every finished realization. */
typedef void (*rmtfid_progress_fn)(int completed, int total, void* user);

RMTFID_API const char* rmtfid_version(void);
RMTFID_API const char* rmtfid_last_error(void);
RMTFID_API void rmtfid_string_free(char* s);

/* Canonical 17-significant-digit rendering; writes at most cap bytes incl. NUL. */
RMTFID_API rmtfid_status rmtfid_format_real(double value, char* buf, size_t cap);

/* ---- configuration ---------------------------------------------------- */

RMTFID_API rmtfid_status rmtfid_config_new(rmtfid_config** out);
RMTFID_API rmtfid_status rmtfid_config_load(const char* path, rmtfid_config** out);
RMTFID_API rmtfid_status rmtfid_config_parse(const char* json_text, rmtfid_config** out);
RMTFID_API void rmtfid_config_free(rmtfid_config* config);

/* Keys follow the JSON config schema: n_levels, beta, n_realizations, workers
 * (integers); master_seed (unsigned); lambda_par, lambda_perp, tau_min,
 * tau_max, tau_step, window_fraction (reals); mode ("uniform"/"gaussian"). */
RMTFID_API rmtfid_status rmtfid_config_set_int(rmtfid_config* config, const char* key, int64_t value);
RMTFID_API rmtfid_status rmtfid_config_set_seed(rmtfid_config* config, uint64_t seed);
RMTFID_API rmtfid_status rmtfid_config_set_real(rmtfid_config* config, const char* key, double value);
RMTFID_API rmtfid_status rmtfid_config_set_string(rmtfid_config* config, const char* key, const char* value);
RMTFID_API rmtfid_status rmtfid_config_get_int(const rmtfid_config* config, const char* key, int64_t* out);
RMTFID_API rmtfid_status rmtfid_config_validate(const rmtfid_config* config);
RMTFID_API rmtfid_status rmtfid_config_to_json(const rmtfid_config* config, char** out);

/* ---- Monte Carlo runs ------------------------------------------------- */

RMTFID_API rmtfid_status rmtfid_run_simulate(const rmtfid_config* config, rmtfid_progress_fn progress,
                                             void* user, rmtfid_run** out);
RMTFID_API rmtfid_status rmtfid_run_load(const char* path, rmtfid_format format, rmtfid_run** out);
RMTFID_API rmtfid_status rmtfid_run_merge(const rmtfid_run* a, const rmtfid_run* b, rmtfid_run** out);
RMTFID_API void rmtfid_run_free(rmtfid_run* run);

RMTFID_API rmtfid_status rmtfid_run_save(const rmtfid_run* run, const char* path, rmtfid_format format);
RMTFID_API rmtfid_status rmtfid_run_serialize(const rmtfid_run* run, rmtfid_format format, char** out);

RMTFID_API size_t rmtfid_run_size(const rmtfid_run* run);
RMTFID_API int64_t rmtfid_run_count(const rmtfid_run* run);

typedef struct rmtfid_point {
  double tau;
  double f_re_mean, f_im_mean, f_re_stderr, f_im_stderr;
  double k_re_mean, k_im_mean, k_re_stderr, k_im_stderr;
  double theory;
} rmtfid_point;

RMTFID_API rmtfid_status rmtfid_run_point(const rmtfid_run* run, size_t index, rmtfid_point* out);

/* ---- comparison against theory ---------------------------------------- */

typedef struct rmtfid_thresholds {
  double z_max;
  double f_fraction;
  double z_point;
  double max_abs_deviation;
  double fk_fraction;
  int require_k_vs_theory;
  double k_fraction;
} rmtfid_thresholds;

RMTFID_API void rmtfid_thresholds_default(rmtfid_thresholds* out);
/* thresholds may be NULL for the defaults. */
RMTFID_API rmtfid_status rmtfid_compare(const rmtfid_run* run, const rmtfid_thresholds* thresholds,
                                        rmtfid_report** out);
RMTFID_API int rmtfid_report_passed(const rmtfid_report* report);
RMTFID_API rmtfid_status rmtfid_report_to_json(const rmtfid_report* report, char** out);
RMTFID_API void rmtfid_report_free(rmtfid_report* report);

/* ---- closed forms and sampler checks ---------------------------------- */

RMTFID_API rmtfid_status rmtfid_theory_fidelity(double lambda_par, double lambda_perp, int beta,
                                                double tau, double* out);
RMTFID_API rmtfid_status rmtfid_theory_log_perturbative(double lambda, int beta, double tau,
                                                        double c_corr, double* out);
RMTFID_API rmtfid_status rmtfid_theory_identity_residual(double lambda_par, double lambda_perp,
                                                         int beta, double tau, double step,
                                                         double* out);
RMTFID_API rmtfid_status rmtfid_spreading_width(double lambda, double mean_spacing, double* out);

/* JSON report of the sampler's second moments; *passed is 1 when all |z| <= 5. */
RMTFID_API rmtfid_status rmtfid_moment_check(int beta, int n, int64_t n_samples, uint64_t seed,
                                             char** json_out, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* RMTFID_H */
