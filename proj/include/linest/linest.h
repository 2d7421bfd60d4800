/*
 * linest: generative versus discriminative linear estimation.
 *
 * C interface to the linest shared library. All objects are opaque handles
 * created by a linest_*_create / linest_*_read / linest_fit_* / linest_run call
 * and released with the matching *_destroy function. Every fallible call
 * returns a linest_status; on failure the calling thread's
 * linest_last_error() describes what went wrong.
 *
 * Matrices cross the boundary as row-major double arrays.
 */
#ifndef LINEST_LINEST_H
#define LINEST_LINEST_H

#include <stddef.h>
#include <stdint.h>

#if defined(LINEST_BUILDING_LIBRARY)
#  define LINEST_API __attribute__((visibility("default")))
#else
#  define LINEST_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum linest_status {
    LINEST_OK = 0,
    LINEST_ERR_INVALID_INPUT = 1,
    LINEST_ERR_SINGULAR = 2,
    LINEST_ERR_CONFIG = 3,
    LINEST_ERR_IO = 4,
    LINEST_ERR_INTERNAL = 5
} linest_status;

typedef enum linest_gain_form {
    LINEST_FORM_AUTO = 0, /* B when N_y <= N_x, else A */
    LINEST_FORM_A = 1,    /* inverts H C H^T + sigma2 I */
    LINEST_FORM_B = 2     /* inverts H^T H + sigma2 C^-1 */
} linest_gain_form;

typedef struct linest_dataset linest_dataset;
typedef struct linest_known linest_known;
typedef struct linest_estimator linest_estimator;
typedef struct linest_config linest_config;
typedef struct linest_report linest_report;

LINEST_API const char* linest_version(void);
LINEST_API const char* linest_status_string(linest_status status);
/* Message for the last failed call on this thread; "" when none. */
LINEST_API const char* linest_last_error(void);

/* ---- datasets --------------------------------------------------------- */

/* xs is n x nx, ys is n x ny, both row-major. */
LINEST_API linest_status linest_dataset_create(size_t n, size_t nx, size_t ny, const double* xs,
                                               const double* ys, linest_dataset** out);
/* Two CSV matrix blocks: X (n x N_x) then Y (n x N_y). */
LINEST_API linest_status linest_dataset_read(const char* path, linest_dataset** out);
LINEST_API linest_status linest_dataset_dims(const linest_dataset* data, size_t* n, size_t* nx, size_t* ny);
LINEST_API void linest_dataset_destroy(linest_dataset* data);

/* ---- known statistics (target prior and noise variance) --------------- */

/* c_yy is ny x ny row-major and must be symmetric positive definite; sigma2 > 0. */
LINEST_API linest_status linest_known_create(size_t ny, const double* mu_y, const double* c_yy, double sigma2,
                                             linest_known** out);
/* Three CSV matrix blocks: mu_y, C_yy, sigma2. */
LINEST_API linest_status linest_known_read(const char* path, linest_known** out);
LINEST_API void linest_known_destroy(linest_known* known);

/* ---- estimators ------------------------------------------------------- */

/* Sample-LMMSE / empirical risk minimizer. ridge >= 0 is added to C_xx_hat. */
LINEST_API linest_status linest_fit_discriminative(const linest_dataset* data, double ridge, linest_estimator** out);
/* Maximum-likelihood fit of H and mu followed by the LMMSE rule of the fitted
 * model. ridge >= 0 is added to C_yy_hat. */
LINEST_API linest_status linest_fit_generative(const linest_dataset* data, const linest_known* known,
                                               linest_gain_form form, double ridge, linest_estimator** out);

LINEST_API linest_status linest_estimator_dims(const linest_estimator* est, size_t* nx, size_t* ny);
/* Copies A (ny x nx, row-major) into `a`. */
LINEST_API linest_status linest_estimator_gain(const linest_estimator* est, double* a, size_t capacity);
LINEST_API linest_status linest_estimator_offset(const linest_estimator* est, double* b, size_t capacity);
/* 1 when the estimator carries a fitted model (generative), else 0. */
LINEST_API int linest_estimator_has_model(const linest_estimator* est);
/* Copies H_hat (nx x ny, row-major) and mu_hat (nx). Generative estimators only. */
LINEST_API linest_status linest_estimator_model(const linest_estimator* est, double* h_hat, size_t h_capacity,
                                                double* mu_hat, size_t mu_capacity);
LINEST_API double linest_estimator_condition(const linest_estimator* est);
/* y = A x + b. */
LINEST_API linest_status linest_estimator_apply(const linest_estimator* est, const double* x, size_t nx, double* y,
                                                size_t ny);
LINEST_API void linest_estimator_destroy(linest_estimator* est);

/* ---- experiments ------------------------------------------------------ */

/* Parses, fills defaults and validates a JSON experiment config. On
 * LINEST_ERR_CONFIG linest_last_error() lists one problem per line. */
LINEST_API linest_status linest_config_parse(const char* json_text, linest_config** out);
LINEST_API linest_status linest_config_set_trials(linest_config* cfg, uint64_t trials);
LINEST_API linest_status linest_config_set_seed(linest_config* cfg, uint64_t seed);
LINEST_API uint64_t linest_config_seed(const linest_config* cfg);
/* Fully resolved config as JSON. Owned by the handle; valid until the next
 * modification or destruction of cfg. */
LINEST_API const char* linest_config_json(const linest_config* cfg);
LINEST_API void linest_config_destroy(linest_config* cfg);

/* Runs the configured sweep. threads = 0 uses every hardware thread; the
 * results do not depend on the thread count. */
LINEST_API linest_status linest_run(const linest_config* cfg, unsigned threads, linest_report** out);
/* Results table; owned by the report. */
LINEST_API const char* linest_report_csv(const linest_report* report);
/* Config echo, warnings, failures and oracle gaps as JSON; owned by the report. */
LINEST_API const char* linest_report_metadata(const linest_report* report);
LINEST_API size_t linest_report_condition_warnings(const linest_report* report);
LINEST_API void linest_report_destroy(linest_report* report);

#ifdef __cplusplus
}
#endif

#endif /* LINEST_LINEST_H */
