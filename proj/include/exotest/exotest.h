/*
 * exotest C API.
 *
 * Exogeneity tests for a categorical treatment in right-censored duration
 * data. All objects are opaque handles owned by the caller and released with
 * the matching *_free function. Every fallible call returns an exo_status;
 * on failure, exo_last_error() describes the problem (per thread, valid until
 * the next failing call on that thread).
 *
 * Strings returned through `char **` out-parameters are NUL-terminated,
 * heap-allocated, and must be released with exo_string_free().
 */
#ifndef EXOTEST_EXOTEST_H
#define EXOTEST_EXOTEST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EXOTEST_BUILDING)
#    define EXOTEST_API __declspec(dllexport)
#  else
#    define EXOTEST_API __declspec(dllimport)
#  endif
#else
#  define EXOTEST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum exo_status {
  EXO_OK = 0,
  EXO_ERR_INVALID_ARGUMENT = 1, /* bad option value or null pointer */
  EXO_ERR_PARSE = 2,            /* malformed CSV input */
  EXO_ERR_IO = 3,               /* file could not be read */
  EXO_ERR_DEGENERATE = 4,       /* data cannot support the estimator */
  EXO_ERR_INTERNAL = 5
} exo_status;

typedef enum exo_statistic { EXO_STAT_KS = 0, EXO_STAT_CM = 1 } exo_statistic;
typedef enum exo_boot_kind { EXO_BOOT_A = 0, EXO_BOOT_B = 1 } exo_boot_kind;
typedef enum exo_weight_scheme {
  EXO_WEIGHTS_CONSTANT = 0,
  EXO_WEIGHTS_EMPIRICAL = 1
} exo_weight_scheme;

typedef struct exo_dataset exo_dataset;
typedef struct exo_report exo_report;

EXOTEST_API const char *exo_version(void);
EXOTEST_API const char *exo_last_error(void);
EXOTEST_API void exo_string_free(char *s);

/* ---- data ---------------------------------------------------------------- */

/* Parses `y,delta,x,w,z` CSV text of `len` bytes. */
EXOTEST_API exo_status exo_dataset_parse(const char *text, size_t len, exo_dataset **out);
EXOTEST_API exo_status exo_dataset_read(const char *path, exo_dataset **out);
EXOTEST_API void exo_dataset_free(exo_dataset *data);
EXOTEST_API size_t exo_dataset_size(const exo_dataset *data);
EXOTEST_API exo_status exo_dataset_to_csv(const exo_dataset *data, char **csv);

/* Per (x,w,z) cell: x,w,z,count,censoring_rate */
EXOTEST_API exo_status exo_cell_table_csv(const exo_dataset *data, char **csv);
/* (x,z) and (x,w,z) cells with fewer than `threshold` rows, same columns
 * (w written as * for (x,z) cells). `*count` receives the number of rows. */
EXOTEST_API exo_status exo_small_cells_csv(const exo_dataset *data, size_t threshold,
                                           char **csv, size_t *count);
/* Kaplan-Meier curves of T per (x,z): x,w,z,t,cdf,at_risk,events */
EXOTEST_API exo_status exo_survival_curves_csv(const exo_dataset *data, char **csv);
/* Log-rank tests of T across z: overall and within each x level.
 * Columns: stratum,chi_square,df,p_value */
EXOTEST_API exo_status exo_logrank_csv(const exo_dataset *data, char **csv);
/* Estimated conditional ranks: v_hat,delta,x,w,z */
EXOTEST_API exo_status exo_ranks_csv(const exo_dataset *data, char **csv);
/* D(v,x,w) on the evaluation grid: v,x,w,d_hat */
EXOTEST_API exo_status exo_d_surface_csv(const exo_dataset *data, double gamma, char **csv);

/* ---- bootstrap test ------------------------------------------------------ */

typedef struct exo_test_options {
  exo_statistic statistic;
  exo_boot_kind kind;
  uint32_t replicates;
  uint64_t seed;
  double gamma;
  exo_weight_scheme weights;
  uint32_t threads; /* 0 = hardware concurrency */
} exo_test_options;

/* cm, type A, B = 1000, seed 42, gamma 0, constant weights, all threads. */
EXOTEST_API void exo_test_options_default(exo_test_options *options);

EXOTEST_API exo_status exo_run_test(const exo_dataset *data, const exo_test_options *options,
                                    exo_report **out);
EXOTEST_API void exo_report_free(exo_report *report);
EXOTEST_API double exo_report_statistic(const exo_report *report);
EXOTEST_API double exo_report_p_value(const exo_report *report);
EXOTEST_API size_t exo_report_warnings(const exo_report *report);
EXOTEST_API exo_status exo_report_json(const exo_report *report, int include_t_star, char **json);

/* ---- simulation ---------------------------------------------------------- */

typedef struct exo_dgp_params {
  double alpha;  /* endogeneity */
  double eta;    /* instrument strength */
  double lambda; /* censoring level */
  uint64_t n;
} exo_dgp_params;

/* alpha 0, eta 2.4, lambda -5.7, n 1000. */
EXOTEST_API void exo_dgp_params_default(exo_dgp_params *params);

/* One simulated dataset as CSV; `include_latent` appends the u_t column. */
EXOTEST_API exo_status exo_simulate_csv(const exo_dgp_params *params, uint64_t seed,
                                        int include_latent, char **csv);

typedef struct exo_study_options {
  const exo_statistic *statistics;
  size_t n_statistics;
  const exo_boot_kind *kinds;
  size_t n_kinds;
  uint32_t mc;
  double nominal;
  double gamma;
  exo_weight_scheme weights;
  uint64_t seed;
  uint32_t threads;
} exo_study_options;

/* Both statistics, both kinds, M = 1000, nominal 0.05, gamma 0, constant
 * weights, seed 42, all threads. The statistic/kind arrays point at static
 * storage. */
EXOTEST_API void exo_study_options_default(exo_study_options *options);

/* Warp-speed power study over `n_grid` design points. Writes the summary CSV
 * to `*summary`; when `replicates` is non-null also the per-replication CSV. */
EXOTEST_API exo_status exo_power_study_csv(const exo_dgp_params *grid, size_t n_grid,
                                           const exo_study_options *options, char **summary,
                                           char **replicates);

#ifdef __cplusplus
}
#endif

#endif /* EXOTEST_EXOTEST_H */
