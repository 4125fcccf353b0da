/*
 * wsarma: portmanteau diagnostics for weak seasonal ARMA models.
 *
 * Every fallible call returns a wsarma_status. On failure the message is
 * available from wsarma_last_error() on the calling thread until the next
 * call on that thread. Objects are opaque and released with their _free
 * function; strings returned through char** are released with
 * wsarma_string_free.
 */
#ifndef WSARMA_WSARMA_H
#define WSARMA_WSARMA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WSARMA_BUILDING_LIBRARY)
#    define WSARMA_API __declspec(dllexport)
#  else
#    define WSARMA_API __declspec(dllimport)
#  endif
#else
#  define WSARMA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wsarma_status {
  WSARMA_OK = 0,
  WSARMA_E_INVALID_INPUT = 1,
  WSARMA_E_NON_STATIONARY_SPEC = 2,
  WSARMA_E_BOUNDARY_SOLUTION = 3,
  WSARMA_E_RANK_DEFICIENT = 4,
  WSARMA_E_DEGENERATE_SERIES = 5,
  WSARMA_E_NOT_APPLICABLE = 6,
  WSARMA_E_UNSTABLE_VAR = 7,
  WSARMA_E_NON_PSD_ESTIMATE = 8,
  WSARMA_E_NUMERICAL_FAILURE = 9,
  WSARMA_E_DEGENERATE_NORMALIZER = 10,
  WSARMA_E_DEGENERATE_INFERENCE = 11,
  WSARMA_E_PARSE_ERROR = 12,
  WSARMA_E_MISSING_DATA = 13,
  WSARMA_E_DOMAIN_ERROR = 14,
  WSARMA_E_EXPERIMENT_INTEGRITY = 15,
  WSARMA_E_IO_ERROR = 16,
  WSARMA_E_INTERNAL = 100
} wsarma_status;

typedef struct wsarma_series wsarma_series;
typedef struct wsarma_fit wsarma_fit;
typedef struct wsarma_uk_table wsarma_uk_table;
typedef struct wsarma_report wsarma_report;

/* (p,q)(P,Q)_s. theta is laid out a_1..a_p, b_1..b_q, A_1..A_P, B_1..B_Q. */
typedef struct wsarma_order {
  int p, q, P, Q, s;
} wsarma_order;

WSARMA_API const char* wsarma_version(void);
WSARMA_API const char* wsarma_last_error(void);
WSARMA_API const char* wsarma_status_name(wsarma_status status);
WSARMA_API void wsarma_string_free(char* s);

/* ---- series ---------------------------------------------------------- */

WSARMA_API wsarma_status wsarma_series_from_array(const double* x, size_t n, wsarma_series** out);
/* SILSO monthly file; from/to are "YYYY-MM" (NULL for 2010-01 / 2018-12). */
WSARMA_API wsarma_status wsarma_series_load_silso(const char* path, const char* from, const char* to,
                                                  wsarma_series** out);
WSARMA_API wsarma_status wsarma_series_load_plain(const char* path, wsarma_series** out);
/* X_t = Z_t - mean(Z), Z_t = log y_t - log y_{t-1}. first_month ("YYYY-MM")
 * may be NULL; when given, domain errors name the month. */
WSARMA_API wsarma_status wsarma_series_logdiff_center(const wsarma_series* in, const char* first_month,
                                                      wsarma_series** out);
WSARMA_API size_t wsarma_series_length(const wsarma_series* s);
WSARMA_API const double* wsarma_series_data(const wsarma_series* s);
WSARMA_API void wsarma_series_free(wsarma_series* s);

/* ---- simulation ------------------------------------------------------ */

/* ARCH(1) innovations eps_t = sqrt(omega + alpha1 eps_{t-1}^2) eta_t;
 * alpha1 = 0 gives iid Gaussian noise. */
typedef struct wsarma_noise_config {
  double alpha1;
  double omega;
  uint64_t seed;
  size_t noise_burnin;
} wsarma_noise_config;

WSARMA_API void wsarma_noise_config_default(wsarma_noise_config* cfg);
/* model_burnin = 0 selects the default model burn-in. */
WSARMA_API wsarma_status wsarma_simulate(wsarma_order order, const double* theta, size_t theta_len,
                                         const wsarma_noise_config* noise, size_t n, size_t model_burnin,
                                         wsarma_series** out);

/* ---- estimation ------------------------------------------------------ */

typedef struct wsarma_fit_options {
  const int* free_mask; /* one flag per theta entry, 0 pins it at zero; NULL = all free */
  size_t mask_len;
  int random_starts;
  double start_scale;
  uint64_t seed;
  int max_iterations;
  double gradient_tolerance;
  int lrv_r_max;
} wsarma_fit_options;

WSARMA_API void wsarma_fit_options_default(wsarma_fit_options* opts);
WSARMA_API wsarma_status wsarma_fit_series(const wsarma_series* x, wsarma_order order,
                                           const wsarma_fit_options* opts, wsarma_fit** out);
WSARMA_API size_t wsarma_fit_theta_len(const wsarma_fit* f);
WSARMA_API size_t wsarma_fit_num_free(const wsarma_fit* f);
/* Full theta (pinned entries are 0). */
WSARMA_API wsarma_status wsarma_fit_theta(const wsarma_fit* f, double* theta, size_t len);
/* Standard errors of the free coefficients, in theta order. */
WSARMA_API wsarma_status wsarma_fit_se(const wsarma_fit* f, double* se, size_t len);
WSARMA_API double wsarma_fit_sigma2(const wsarma_fit* f);
WSARMA_API wsarma_status wsarma_fit_json(const wsarma_fit* f, double level, char** out);
WSARMA_API void wsarma_fit_free(wsarma_fit* f);

/* ---- U_K quantile table ---------------------------------------------- */

typedef struct wsarma_uk_config {
  int grid_steps;
  int replications;
  uint64_t seed;
  int k_max;
  unsigned threads; /* 0 = hardware concurrency */
} wsarma_uk_config;

WSARMA_API void wsarma_uk_config_default(wsarma_uk_config* cfg);
/* Loads cache_path when it matches cfg, otherwise simulates and rewrites it.
 * cache_path may be NULL (no caching). */
WSARMA_API wsarma_status wsarma_uk_table_open(const char* cache_path, const wsarma_uk_config* cfg,
                                              wsarma_uk_table** out);
WSARMA_API wsarma_status wsarma_uk_table_save(const wsarma_uk_table* t, const char* path);
WSARMA_API wsarma_status wsarma_uk_quantile(wsarma_uk_table* t, int K, double level, double* out);
/* Rows "K level quantile" as text. */
WSARMA_API wsarma_status wsarma_uk_table_text(const wsarma_uk_table* t, char** out);
WSARMA_API void wsarma_uk_table_free(wsarma_uk_table* t);

/* ---- diagnostics ----------------------------------------------------- */

typedef struct wsarma_diagnose_options {
  wsarma_order order;
  const int* m_list;
  size_t m_count;
  const char* methods; /* comma-separated, e.g. "lb-sn,lb-w"; NULL = all six */
  double alpha;
  const wsarma_fit_options* fit; /* NULL = defaults; its free_mask applies */
} wsarma_diagnose_options;

/* Recorded verbatim in the report; input_path is also hashed when non-NULL. */
typedef struct wsarma_provenance {
  const char* input_path;
  const char* input_format;
  const char* range;
  int n_raw;
  int transformed;
} wsarma_provenance;

WSARMA_API wsarma_status wsarma_diagnose(const wsarma_series* x, const wsarma_diagnose_options* opts,
                                         const wsarma_provenance* prov, wsarma_uk_table* table,
                                         wsarma_report** out);
WSARMA_API wsarma_status wsarma_report_json(const wsarma_report* r, char** out);
WSARMA_API wsarma_status wsarma_report_write_plot(const wsarma_report* r, const char* path);
WSARMA_API void wsarma_report_free(wsarma_report* r);

/* ---- Monte Carlo ----------------------------------------------------- */

typedef struct wsarma_mc_config {
  const char* design; /* "size" or "power" */
  int s;
  int n;
  int replications;
  double alpha1;
  const int* m_list;
  size_t m_count;
  const char* methods; /* NULL = all six */
  double alpha;
  uint64_t master_seed;
  int path_length; /* > n: use the first n values of a longer path */
  unsigned threads;
  double max_failure_fraction; /* share of failed fits tolerated; <= 0 = 0.02 */
} wsarma_mc_config;

/* Writes CSV rows s,n,m,method,freq,flag to *csv_out. */
WSARMA_API wsarma_status wsarma_mc_run(const wsarma_mc_config* cfg, wsarma_uk_table* table, char** csv_out,
                                       int* failures);

/* ---- quadratic forms ------------------------------------------------- */

/* P(sum xi_i Z_i^2 > x). */
WSARMA_API wsarma_status wsarma_quadform_tail(const double* xi, size_t k, double x, double* out);

#ifdef __cplusplus
}
#endif

#endif
