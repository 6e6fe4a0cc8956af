/*
 * C interface of the robust-bounds library.
 *
 * Conventions:
 *  - every fallible call returns an otk_status; OTK_OK is 0;
 *  - on failure, otk_last_error() returns a thread-local description of the
 *    most recent error in the calling thread;
 *  - objects are opaque handles created/destroyed by matching calls;
 *  - strings returned through char** are heap-allocated and must be released
 *    with otk_string_free().
 */
#ifndef OTRISK_OTRISK_H
#define OTRISK_OTRISK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OTRISK_API __declspec(dllexport)
#else
#define OTRISK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum otk_status {
    OTK_OK = 0,
    OTK_INVALID_INPUT = 1,
    OTK_PARSE_ERROR = 2,
    OTK_UNSUPPORTED = 3,
    OTK_SOLVER_ERROR = 4,
    OTK_UNBOUNDED_DUAL = 5,
    OTK_INFEASIBLE_COUPLING = 6,
    OTK_INVALID_PROJECTION = 7,
    OTK_RESOLUTION_ERROR = 8,
    OTK_RUNTIME_ERROR = 9
} otk_status;

/* Library version string, static storage. */
OTRISK_API const char* otk_version(void);

/* Thread-local message of the last failing call in this thread ("" if none). */
OTRISK_API const char* otk_last_error(void);

/* ---------------------------------------------------------------------------
 * Finite instances: sup { E_nu f : transport cost from mu at most delta }
 * on an n-point space with explicit cost matrix.
 * ------------------------------------------------------------------------- */

typedef struct otk_finite_instance otk_finite_instance;

/* cost is row-major n x n; zero diagonal, positive off-diagonal. */
OTRISK_API otk_status otk_finite_instance_create(const double* support, const double* mu,
                                                 const double* f, const double* cost,
                                                 size_t n, double delta,
                                                 otk_finite_instance** out);
OTRISK_API otk_status otk_finite_instance_from_json(const char* json_text,
                                                    otk_finite_instance** out);
OTRISK_API void otk_finite_instance_destroy(otk_finite_instance* inst);

/* Exact LP value; any output pointer may be NULL. */
OTRISK_API otk_status otk_solve_primal_lp(const otk_finite_instance* inst, double* value,
                                          double* transport_cost, size_t* iterations);

/* Univariate convex dual; attained_at_zero is 0/1. */
OTRISK_API otk_status otk_solve_dual(const otk_finite_instance* inst, double* value,
                                     double* lambda_star, int* attained_at_zero);

/* Solves both sides; gap = |primal - dual|. */
OTRISK_API otk_status otk_duality_gap(const otk_finite_instance* inst, double* primal,
                                      double* dual, double* gap);

/* ---------------------------------------------------------------------------
 * Distance profiles: worst-case probability of a set from the distribution of
 * set distances under the baseline measure.
 * ------------------------------------------------------------------------- */

typedef struct otk_profile otk_profile;

OTRISK_API otk_status otk_profile_create(const double* distances, const double* weights,
                                         size_t n, otk_profile** out);
OTRISK_API void otk_profile_destroy(otk_profile* profile);

/* h(u) = sum of w * d over distances d <= u. */
OTRISK_API otk_status otk_profile_h(const otk_profile* profile, double u, double* out);

/* Exact worst-case probability at budget delta; outputs may be NULL.
 * lambda_star is +inf at delta = 0 (sentinel), u_star is +inf when delta
 * exceeds the total transport cost. */
OTRISK_API otk_status otk_worst_case_probability(const otk_profile* profile, double delta,
                                                 double* value, double* lambda_star,
                                                 double* u_star);

/* ---------------------------------------------------------------------------
 * Closed forms and experiment runners.
 * ------------------------------------------------------------------------- */

/* P( sup_{t<=T} (vol B(t) - drift t) >= level ), reflection formula. */
OTRISK_API otk_status otk_brownian_crossing_prob(double level, double drift, double vol,
                                                 double horizon, double* out);

/* Runs one experiment ("verify-duality", "ruin1d", "ruin2d", "reinsurance",
 * "calibrate") with a JSON configuration (NULL or "" = defaults).  On success
 * *report_json receives the JSON report and, if csv_text is non-NULL,
 * *csv_text the CSV companion (may be an empty string).  Both are released
 * with otk_string_free(). */
OTRISK_API otk_status otk_run_experiment(const char* command, const char* config_json,
                                         char** report_json, char** csv_text);

OTRISK_API void otk_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OTRISK_OTRISK_H */
