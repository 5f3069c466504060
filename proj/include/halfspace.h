#ifndef HALFSPACE_H
#define HALFSPACE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HP_API __declspec(dllexport)
#else
#define HP_API __attribute__((visibility("default")))
#endif

typedef enum hp_status {
    HP_OK = 0,
    HP_ERR_INVALID_ARGUMENT = 1,
    HP_ERR_PARSE = 2,
    HP_ERR_ELLIPTICITY = 3,
    HP_ERR_LOPATINSKII = 4,
    HP_ERR_CONDITIONING = 5,
    HP_ERR_NUMERICAL = 6,
    HP_ERR_IO = 7,
    HP_ERR_INTERNAL = 99
} hp_status;

/* Opaque handles. */
typedef struct hp_problem hp_problem;
typedef struct hp_result hp_result;

HP_API const char* hp_version(void);

/* Message of the last failed call on this thread ("" if none). */
HP_API const char* hp_last_error(void);

/* Worker threads for data-parallel loops; n <= 0 restores the default. */
HP_API void hp_set_threads(int n);
HP_API int hp_threads(void);

/* ---- problems ---------------------------------------------------------- */

HP_API hp_status hp_problem_load(const char* path, hp_problem** out);
HP_API hp_status hp_problem_parse(const char* json, hp_problem** out);
HP_API void hp_problem_free(hp_problem* problem);

HP_API int hp_problem_dim(const hp_problem* problem);
HP_API int hp_problem_half_order(const hp_problem* problem);
HP_API int hp_problem_boundary_order(const hp_problem* problem, int j);
HP_API int hp_problem_k_max(const hp_problem* problem);

/* A(xi) for xi of length dim. */
HP_API hp_status hp_symbol(const hp_problem* problem, const double* xi, size_t len, double* re, double* im);

/* D_n^k of the j-th scalar Poisson kernel at (xi', lambda, x_n); xi' has
   dim - 1 entries. */
HP_API hp_status hp_poisson_kernel(const hp_problem* problem, const double* xi_prime, size_t len, double lambda_re,
                                   double lambda_im, int j, int k, double x_n, double* re, double* im);

/* (-1 - r + p(k - m_j) + p[t - s]_+) / (2mp); fails for inadmissible queries. */
HP_API hp_status hp_predicted_decay_exponent(int k, double p, double r, double t, double s, int m_j, int m,
                                             double* out);

/* ---- experiments ------------------------------------------------------- */

/* Names of the experiments accepted by hp_run. */
HP_API size_t hp_experiment_count(void);
HP_API const char* hp_experiment_name(size_t index);

/* Runs one experiment. config_json may be NULL for defaults; config_source
   names the configuration in diagnostics (may be NULL). */
HP_API hp_status hp_run(const hp_problem* problem, const char* experiment, const char* config_json,
                        const char* config_source, hp_result** out);
HP_API void hp_result_free(hp_result* result);

/* 1 when every tolerance check passed. */
HP_API int hp_result_passed(const hp_result* result);
/* RFC-4180 CSV of the result table. Owned by the result. */
HP_API const char* hp_result_csv(const hp_result* result);
/* JSON summary: configuration, checks, derived quantities and, when the
   experiment has one, a "plot" object. Owned by the result. */
HP_API const char* hp_result_summary(const hp_result* result);
HP_API size_t hp_result_rows(const hp_result* result);
HP_API size_t hp_result_columns(const hp_result* result);
HP_API const char* hp_result_column_name(const hp_result* result, size_t column);
/* Numeric cell value; text cells read as NaN. */
HP_API hp_status hp_result_value(const hp_result* result, size_t row, size_t column, double* out);

#ifdef __cplusplus
}
#endif

#endif
