/* C interface of the mellinridge library.
 *
 * Every function that can fail returns an mr_status; on failure a
 * description is available from mr_last_error() on the calling thread.
 * Objects are opaque handles released with their *_destroy function.
 */
#ifndef MELLINRIDGE_H
#define MELLINRIDGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MR_API __declspec(dllexport)
#else
#define MR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mr_status
{
  MR_OK = 0,
  MR_INVALID_ARGUMENT = 1,
  MR_DOMAIN = 2,
  MR_G0_VIOLATION = 3,
  MR_EMPTY_ADMISSIBLE = 4,
  MR_NUMERICAL = 5,
  MR_IO = 6,
  MR_PARSE = 7,
  MR_UNKNOWN_ID = 8,
  MR_INTERNAL = 99
} mr_status;

typedef enum mr_density
{
  MR_BETA25 = 0,
  MR_LOGGAMMA = 1,
  MR_GAMMA5 = 2,
  MR_LOGNORMAL = 3,
  MR_NOISE_UNIFORM = 4,
  MR_NOISE_BETA = 5
} mr_density;

typedef enum mr_method
{
  MR_RIDGE = 0,
  MR_CUTOFF = 1
} mr_method;

/* Where the variance penalty enters the supremum of the ridge bias proxy. */
typedef enum mr_penalty
{
  MR_PENALTY_COMPARED_LEVEL = 0,
  MR_PENALTY_CANDIDATE_LEVEL = 1
} mr_penalty;

MR_API const char* mr_last_error(void);
MR_API const char* mr_status_string(mr_status status);
MR_API const char* mr_version(void);

/* ---- catalog ---------------------------------------------------------- */

MR_API mr_status mr_density_from_name(const char* name, mr_density* out);
MR_API const char* mr_density_name(mr_density id);
MR_API mr_status mr_method_from_name(const char* name, mr_method* out);
MR_API const char* mr_method_name(mr_method method);
MR_API int mr_density_is_error(mr_density id);

MR_API mr_status mr_density_eval(mr_density id, double x, double* out);

/* M_c[h](t) of a catalog density. */
MR_API mr_status mr_catalog_mellin(mr_density id, double c, double t,
                                   double* re, double* im);

/* ---- samples ---------------------------------------------------------- */

typedef struct mr_sample mr_sample;

MR_API mr_status mr_sample_from_array(const double* y, size_t n,
                                      mr_sample** out);
MR_API mr_status mr_sample_read_csv(const char* path, mr_sample** out);
MR_API mr_status mr_sample_write_csv(const mr_sample* s, const char* path);

/* n draws of Y = X U with X ~ target and U ~ error. */
MR_API mr_status mr_sample_simulate(mr_density target, mr_density error,
                                    size_t n, uint64_t seed, mr_sample** out);
MR_API size_t mr_sample_size(const mr_sample* s);
MR_API const double* mr_sample_data(const mr_sample* s);
MR_API void mr_sample_destroy(mr_sample* s);

/* ---- estimation ------------------------------------------------------- */

typedef struct mr_quadrature
{
  double t_step;       /* largest t-grid spacing */
  double t_max;        /* cap on the truncation point */
  double rel_tail_tol; /* acceptable relative tail mass */
} mr_quadrature;

typedef struct mr_selection
{
  double chi1;
  double chi2;
  double chi;
  double r;
  mr_penalty penalty;
  const int* k_grid; /* NULL: 1, 2, ... until the first inadmissible level */
  size_t k_grid_len;
} mr_selection;

typedef struct mr_estimate_options
{
  mr_density error;
  double c;
  mr_method method;
  mr_selection selection;
  double fixed_k; /* > 0 skips data-driven selection */
  double x_min;
  double x_max;
  size_t x_points;
  mr_quadrature quadrature;
} mr_estimate_options;

/* Defaults tuned for the given error density. */
MR_API mr_status mr_estimate_options_default(mr_density error,
                                             mr_estimate_options* out);

typedef struct mr_estimate mr_estimate;

MR_API mr_status mr_estimate_run(const mr_sample* s,
                                 const mr_estimate_options* opts,
                                 mr_estimate** out);
MR_API double mr_estimate_k(const mr_estimate* e);
MR_API double mr_estimate_sigma_hat(const mr_estimate* e);
MR_API size_t mr_estimate_admissible_count(const mr_estimate* e);
MR_API size_t mr_estimate_size(const mr_estimate* e);
MR_API const double* mr_estimate_x(const mr_estimate* e);
MR_API const double* mr_estimate_values(const mr_estimate* e);
MR_API mr_status mr_estimate_write_csv(const mr_estimate* e, const char* path);
/* Fails with MR_INVALID_ARGUMENT for fixed-k estimates. */
MR_API mr_status mr_estimate_write_diagnostics_csv(const mr_estimate* e,
                                                   const char* path);
MR_API void mr_estimate_destroy(mr_estimate* e);

/* ---- Monte-Carlo experiments ------------------------------------------ */

typedef struct mr_experiment
{
  mr_density target;
  mr_density error;
  size_t n;
  double c;
  mr_method method;
  mr_selection selection;
  size_t replications;
  uint64_t seed;
  double x_min;
  double x_max;
  size_t x_points;
  mr_quadrature quadrature;
  double fixed_k;   /* > 0 uses this level in every replication */
  unsigned threads; /* 0: hardware concurrency */
} mr_experiment;

MR_API mr_status mr_experiment_default(mr_density target, mr_density error,
                                       size_t n, mr_method method,
                                       mr_experiment* out);

typedef struct mr_mise mr_mise;

MR_API mr_status mr_mise_run(const mr_experiment* cfg, mr_mise** out);
MR_API double mr_mise_value(const mr_mise* m);
MR_API double mr_mise_se(const mr_mise* m);
MR_API double mr_mise_scaled(const mr_mise* m);
MR_API double mr_mise_median(const mr_mise* m);
MR_API size_t mr_mise_replications(const mr_mise* m);
MR_API const double* mr_mise_errors(const mr_mise* m);
MR_API const double* mr_mise_levels(const mr_mise* m);
MR_API void mr_mise_destroy(mr_mise* m);

/* "scenario,method,n,c,reps,mise_x100,se_x100" */
MR_API const char* mr_mise_csv_header(void);
/* Writes one CSV row (with trailing newline) into buf. `needed` receives the
 * required size including the terminator; MR_INVALID_ARGUMENT if cap is too
 * small. */
MR_API mr_status mr_mise_csv_row(const mr_experiment* cfg, const mr_mise* m,
                                 char* buf, size_t cap, size_t* needed);

/* MISE at k = round(n^(gamma/(2s+2gamma+1))) for each n; the three output
 * arrays have len entries. */
MR_API mr_status mr_oracle_rate(const mr_experiment* base,
                                const size_t* n_list, size_t len, double s,
                                double gamma, double* k_out, double* mise_out,
                                double* se_out);

/* ---- bias / variance profile ------------------------------------------ */

typedef struct mr_profile_options
{
  mr_density target;
  mr_density error;
  double c;
  double r;
  size_t n;
  const int* k_grid;
  size_t k_grid_len;
  size_t replications;
  uint64_t seed;
  double x_min;
  double x_max;
  size_t x_points;
  mr_quadrature quadrature;
  unsigned threads;
} mr_profile_options;

typedef struct mr_profile_row
{
  int k;
  double bias_sq;
  double variance;
  double bound_bias;
  double bound_var;
} mr_profile_row;

MR_API mr_status mr_profile_options_default(mr_density target,
                                            mr_density error, size_t n,
                                            mr_profile_options* out);

/* rows must hold opts->k_grid_len entries. */
MR_API mr_status mr_profile_run(const mr_profile_options* opts,
                                mr_profile_row* rows);
MR_API mr_status mr_profile_write_csv(const mr_profile_row* rows, size_t len,
                                      const char* path);

#ifdef __cplusplus
}
#endif

#endif
