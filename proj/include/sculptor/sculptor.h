/*
 * sculptor C API.
 *
 * Every function returning int reports a sculptor_status. On failure the
 * message is available from sculptor_last_error() (per thread) until the
 * next call on that thread. Handles are opaque; free each with its
 * matching *_free function. Strings returned through char** are owned by
 * the caller and released with sculptor_string_free().
 */
#ifndef SCULPTOR_SCULPTOR_H
#define SCULPTOR_SCULPTOR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SCULPTOR_BUILDING_LIBRARY)
#    define SCULPTOR_API __declspec(dllexport)
#  else
#    define SCULPTOR_API __declspec(dllimport)
#  endif
#else
#  define SCULPTOR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sculptor_status {
  SCULPTOR_OK = 0,
  SCULPTOR_E_PARAMETER = 1,   /* out-of-range parameter (nu <= 2, n = 0, ...) */
  SCULPTOR_E_MODEL = 2,       /* covariance not symmetric positive-definite */
  SCULPTOR_E_DIMENSION = 3,   /* vector / matrix size mismatch */
  SCULPTOR_E_ABUNDANCE = 4,   /* abundance outside [0, 1) */
  SCULPTOR_E_WEIGHT = 5,      /* prior weights off the simplex */
  SCULPTOR_E_EVALUATION = 6,  /* empty or NaN score arrays */
  SCULPTOR_E_CALIBRATION = 7, /* target norm could not be calibrated */
  SCULPTOR_E_IO = 8,          /* unreadable / unwritable file or bad format */
  SCULPTOR_E_CONFIG = 9,      /* invalid configuration key or value */
  SCULPTOR_E_INTERNAL = 99
} sculptor_status;

typedef struct sculptor_config sculptor_config;
typedef struct sculptor_results sculptor_results;
typedef struct sculptor_background sculptor_background;
typedef struct sculptor_pairs sculptor_pairs;

/* Called with one human-readable line per completed unit of work. */
typedef void (*sculptor_progress_fn)(const char* message, void* user);

SCULPTOR_API const char* sculptor_version(void);
SCULPTOR_API const char* sculptor_last_error(void);
SCULPTOR_API const char* sculptor_status_name(int status);
SCULPTOR_API void sculptor_string_free(char* s);

/* ---- Experiment configuration ------------------------------------------
 * Keys: nu, dim, sigma_t (0 = calibrate), knots (comma list), pairs,
 * trials, stats (comma list of dr@far:<x>, far@dr:<x>, auc), step, iters,
 * restarts, seed, out, glrt, se_mult, calib_pairs, calib_far, calib_low,
 * calib_high. The JSON form is a flat object with the same keys.
 */
SCULPTOR_API int sculptor_config_new(sculptor_config** out);
SCULPTOR_API int sculptor_config_from_json(const char* json, sculptor_config** out);
SCULPTOR_API int sculptor_config_load(const char* path, sculptor_config** out);
/* Rejects (SCULPTOR_E_CONFIG) values that would leave the configuration invalid. */
SCULPTOR_API int sculptor_config_set(sculptor_config* cfg, const char* key, const char* value);
/* Text form of one key, as accepted by sculptor_config_set. */
SCULPTOR_API int sculptor_config_get(const sculptor_config* cfg, const char* key, char** value);
SCULPTOR_API int sculptor_config_to_json(const sculptor_config* cfg, char** out);
SCULPTOR_API void sculptor_config_free(sculptor_config* cfg);

/* ---- Experiments -------------------------------------------------------- */

/* Target norm giving clairvoyant DR@FAR=calib_far inside the calibration band. */
SCULPTOR_API int sculptor_calibrate(const sculptor_config* cfg, double* sigma_t, double* detection_rate);

SCULPTOR_API int sculptor_run_trials(const sculptor_config* cfg, sculptor_progress_fn progress, void* user,
                                     sculptor_results** out);
SCULPTOR_API int sculptor_sweep_knots(const sculptor_config* cfg, sculptor_progress_fn progress, void* user,
                                      sculptor_results** out);
/* Fixed prior; weights == NULL selects the uniform prior. */
SCULPTOR_API int sculptor_compare_detectors(const sculptor_config* cfg, const double* weights, size_t n_weights,
                                            sculptor_progress_fn progress, void* user, sculptor_results** out);

/* Writes summary.json, timing.json, weights/deltas CSVs and SVG plots. */
SCULPTOR_API int sculptor_results_emit(const sculptor_results* res, const char* outdir);
SCULPTOR_API int sculptor_results_to_json(const sculptor_results* res, char** out);
SCULPTOR_API int sculptor_results_summary(const sculptor_results* res, char** out);
SCULPTOR_API int sculptor_results_shape(const sculptor_results* res, size_t* experiments, size_t* statistics);
SCULPTOR_API int sculptor_results_success_fraction(const sculptor_results* res, size_t experiment,
                                                   size_t statistic, double* out);
/* Mean sculpted weights of one (experiment, statistic); weights has room for K values. */
SCULPTOR_API int sculptor_results_mean_weights(const sculptor_results* res, size_t experiment, size_t statistic,
                                               double* weights, size_t K);
SCULPTOR_API void sculptor_results_free(sculptor_results* res);

/* Re-renders SVG plots from a summary.json written by sculptor_results_emit. */
SCULPTOR_API int sculptor_report(const char* summary_json, const char* outdir);

/* ---- Background model --------------------------------------------------- */

/* mu (length d) may be NULL for zero mean; R (d*d, row-major) may be NULL for identity. */
SCULPTOR_API int sculptor_background_new(double nu, int d, const double* mu, const double* R,
                                         sculptor_background** out);
SCULPTOR_API int sculptor_background_log_pdf(const sculptor_background* bkg, const double* x, size_t d,
                                             double* out);
/* Fills out[n*d] row-major. */
SCULPTOR_API int sculptor_background_sample(const sculptor_background* bkg, size_t n, uint64_t seed,
                                            double* out);
SCULPTOR_API void sculptor_background_free(sculptor_background* bkg);

/* ---- Detectors in matched-filter / residual coordinates ----------------- */

SCULPTOR_API int sculptor_log_lr(double nu, int d, double sigma_t, double a, double m, double r, double* out);
SCULPTOR_API int sculptor_glrt(double nu, int d, double sigma_t, double m, double r, double* score,
                               double* argmax);

/* ---- ROC statistics ------------------------------------------------------ */

/* Smaller-is-better value of stat ("dr@far:<x>", "far@dr:<x>", "auc"). */
SCULPTOR_API int sculptor_roc_evaluate(const char* stat, const double* bkg, size_t n_bkg, const double* tgt,
                                       size_t n_tgt, double* out);

/* ---- Matched pairs ------------------------------------------------------- */

SCULPTOR_API int sculptor_pairs_generate(double nu, int d, double sigma_t, int K, size_t n, uint64_t seed,
                                         sculptor_pairs** out);
/* Format chosen by extension: ".csv" for CSV, anything else binary. */
SCULPTOR_API int sculptor_pairs_load(const char* path, sculptor_pairs** out);
SCULPTOR_API int sculptor_pairs_save(const sculptor_pairs* pairs, const char* path);
SCULPTOR_API int sculptor_pairs_info(const sculptor_pairs* pairs, size_t* n, int* K, double* sigma_t);
/* population 0 is the background, k in 1..K the k-th knot. */
SCULPTOR_API int sculptor_pairs_get(const sculptor_pairs* pairs, int population, size_t index, double* m,
                                    double* r);
/* Babysteps on a stored pair set; weights receives K values. */
SCULPTOR_API int sculptor_pairs_sculpt(const sculptor_pairs* pairs, const char* stat, double step, int iters,
                                       int restarts, uint64_t seed, double se_mult, double* weights, size_t K,
                                       double* loss, int* success);
SCULPTOR_API void sculptor_pairs_free(sculptor_pairs* pairs);

#ifdef __cplusplus
}
#endif

#endif /* SCULPTOR_SCULPTOR_H */
