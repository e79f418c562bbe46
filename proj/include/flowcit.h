/*
 * flowcit — conditional independence testing via learned transport maps.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed through these functions; every fallible call returns a status
 * code and leaves a human-readable message in flowcit_last_error() (per
 * thread). Reports and results are immutable once returned.
 */
#ifndef FLOWCIT_H
#define FLOWCIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FLOWCIT_API __declspec(dllexport)
#else
#define FLOWCIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; the CLI uses the same values as process exit codes. */
enum {
    FLOWCIT_OK = 0,
    FLOWCIT_ERR_INTERNAL = 1, /* unexpected failure */
    FLOWCIT_ERR_CONFIG = 2,   /* invalid configuration or arguments */
    FLOWCIT_ERR_DATA = 3,     /* malformed or inconsistent input data */
    FLOWCIT_ERR_NUMERIC = 4   /* numerical failure during computation */
};

enum {
    FLOWCIT_MEASURE_DC = 0, /* distance correlation */
    FLOWCIT_MEASURE_IPC = 1 /* improved projection correlation */
};

enum {
    FLOWCIT_DIRECTION_DC1 = 0, /* test eta against (xi, Z) */
    FLOWCIT_DIRECTION_DC2 = 1  /* test xi against (eta, Z) */
};

enum {
    FLOWCIT_MODEL_CONVERGENCE = 0,
    FLOWCIT_MODEL_UNIVARIATE = 1,
    FLOWCIT_MODEL_LOW_LOW = 2,
    FLOWCIT_MODEL_LOW_HIGH = 3,
    FLOWCIT_MODEL_HIGH_HIGH = 4
};

typedef struct flowcit_dataset flowcit_dataset;
typedef struct flowcit_report flowcit_report;
typedef struct flowcit_sim_result flowcit_sim_result;

/* Test configuration. Zero-initialize, then call flowcit_config_defaults.
 * For simulations, hidden_width = 0 and num_splits = 0 select per-model
 * defaults. */
typedef struct flowcit_config {
    int permutations;     /* B, default 100 */
    int n2;               /* test-fold size; 0 -> floor(4*sqrt(n)) clamped */
    int num_splits;       /* m, default 1 */
    int measure;          /* FLOWCIT_MEASURE_* */
    int direction;        /* FLOWCIT_DIRECTION_* */
    int ode_steps;        /* default 100 */
    int hidden_width;     /* first hidden layer width p1, default 32 */
    int epochs;           /* default 200 */
    int batch_size;       /* default 128 */
    double learning_rate; /* default 1e-3 */
    int resample_noise;   /* 1: redraw noise/times each epoch (default) */
    uint64_t seed;        /* default 42 */
    int workers;          /* default 1 */
} flowcit_config;

typedef struct flowcit_sim_spec {
    int model;   /* FLOWCIT_MODEL_* */
    int setting; /* 1..4; ignored by the convergence model */
    double psi;  /* deviation from the null, >= 0 */
    int dx, dy, dz; /* convergence model only */
    int n;
    int reps;
    uint64_t seed;
} flowcit_sim_spec;

FLOWCIT_API const char* flowcit_version(void);

/* Message describing the most recent error in this thread. */
FLOWCIT_API const char* flowcit_last_error(void);

FLOWCIT_API void flowcit_config_defaults(flowcit_config* cfg);

/* ---- datasets ---- */

/* Row-major arrays: x is n*dx doubles, etc. The data is copied. */
FLOWCIT_API int flowcit_dataset_create(int n, int dx, int dy, int dz, const double* x,
                                       const double* y, const double* z, flowcit_dataset** out);

/* Three aligned numeric CSV files (optional single header row each). */
FLOWCIT_API int flowcit_dataset_from_csv(const char* path_x, const char* path_y,
                                         const char* path_z, int has_header,
                                         flowcit_dataset** out);

FLOWCIT_API void flowcit_dataset_free(flowcit_dataset* ds);
FLOWCIT_API int flowcit_dataset_n(const flowcit_dataset* ds);
FLOWCIT_API int flowcit_dataset_dx(const flowcit_dataset* ds);
FLOWCIT_API int flowcit_dataset_dy(const flowcit_dataset* ds);
FLOWCIT_API int flowcit_dataset_dz(const flowcit_dataset* ds);

/* ---- conditional independence test ---- */

FLOWCIT_API int flowcit_run_test(const flowcit_dataset* ds, const flowcit_config* cfg,
                                 flowcit_report** out);

FLOWCIT_API void flowcit_report_free(flowcit_report* report);
FLOWCIT_API double flowcit_report_pvalue(const flowcit_report* report); /* combined p */
FLOWCIT_API int flowcit_report_num_splits(const flowcit_report* report);
FLOWCIT_API double flowcit_report_split_statistic(const flowcit_report* report, int split);
FLOWCIT_API double flowcit_report_split_pvalue(const flowcit_report* report, int split);
FLOWCIT_API int flowcit_report_split_test_size(const flowcit_report* report, int split);
FLOWCIT_API int flowcit_report_n2(const flowcit_report* report);
FLOWCIT_API uint64_t flowcit_report_seed(const flowcit_report* report);

/* ---- simulation lab ---- */

FLOWCIT_API int flowcit_run_simulation(const flowcit_sim_spec* spec, const flowcit_config* cfg,
                                       double alpha, flowcit_sim_result** out);

FLOWCIT_API void flowcit_sim_result_free(flowcit_sim_result* result);
FLOWCIT_API int flowcit_sim_result_reps(const flowcit_sim_result* result);
FLOWCIT_API double flowcit_sim_result_pvalue(const flowcit_sim_result* result, int rep);
FLOWCIT_API uint64_t flowcit_sim_result_rep_seed(const flowcit_sim_result* result, int rep);
FLOWCIT_API double flowcit_sim_result_rejection_rate(const flowcit_sim_result* result);

/* ---- QQ / calibration helpers ---- */

/* Fills theoretical[i] = (i + 0.5)/count and empirical[i] = i-th sorted
 * p-value; ks_stat (optional) receives max |empirical - theoretical|. */
FLOWCIT_API int flowcit_qq(const double* pvalues, int count, double* theoretical,
                           double* empirical, double* ks_stat);

/* P-values from a single-column file or a simulate output CSV. Free the
 * buffer with flowcit_free_buffer. */
FLOWCIT_API int flowcit_load_pvalues_csv(const char* path, double** out, int* count);
FLOWCIT_API void flowcit_free_buffer(double* buffer);

/* Recommended test-fold size floor(4*sqrt(n)); negative status on error. */
FLOWCIT_API int flowcit_default_n2(int n);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FLOWCIT_H */
