#ifndef GMSPEC_GMSPEC_H
#define GMSPEC_GMSPEC_H

/*
 * C interface to the gmspec library.
 *
 * Every fallible call returns a gmspec_status. On failure the message is
 * available from gmspec_last_error() on the calling thread until the next
 * call on that thread. Strings returned through char** are heap-allocated
 * and released with gmspec_string_free(). Handles are opaque and released
 * with their matching *_free function; passing NULL to a free is a no-op.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GMSPEC_BUILDING)
#define GMSPEC_API __declspec(dllexport)
#else
#define GMSPEC_API __declspec(dllimport)
#endif
#else
#define GMSPEC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gmspec_status {
  GMSPEC_OK = 0,
  GMSPEC_ERR_INVALID_ARGUMENT = 1,
  GMSPEC_ERR_UNSUPPORTED = 2,
  GMSPEC_ERR_INFEASIBLE = 3,
  GMSPEC_ERR_NUMERICAL = 4,
  GMSPEC_ERR_VERIFICATION = 5,
  GMSPEC_ERR_IO = 6,
  GMSPEC_ERR_INTERNAL = 7
} gmspec_status;

GMSPEC_API const char* gmspec_version(void);
GMSPEC_API const char* gmspec_status_name(gmspec_status status);
/* Message of the last failed call on this thread; "" if none. */
GMSPEC_API const char* gmspec_last_error(void);
/* Non-fatal warning left by the last successful call on this thread, or NULL. */
GMSPEC_API const char* gmspec_last_warning(void);
GMSPEC_API void gmspec_string_free(char* s);

/* ---- combinatorics ---------------------------------------------------- */

/* D(m,n) = binomial((m+1)n, n) / (mn+1) as a decimal string. */
GMSPEC_API gmspec_status gmspec_generalized_catalan(uint32_t m, uint32_t n, char** out_decimal);
/* Lattice paths (0,0) -> (n, m n) weakly below y = m x. */
GMSPEC_API gmspec_status gmspec_gridwalk_count(uint32_t m, uint32_t n, char** out_decimal);
/* D(m,k)/D(m,k-1) in lowest terms, m in {2,3}, k >= 1. */
GMSPEC_API gmspec_status gmspec_moment_ratio(uint32_t m, uint32_t k, char** out_numerator,
                                             char** out_denominator);
/* Sets *out_all_equal to 1 iff the convolution recurrence holds for n = 0..n_max. */
GMSPEC_API gmspec_status gmspec_recurrence_check(uint32_t m, uint32_t n_max, int* out_all_equal);

/* ---- random graphs and graph matrices --------------------------------- */

typedef struct gmspec_graph gmspec_graph;

GMSPEC_API gmspec_status gmspec_graph_sample(uint32_t n, uint64_t seed, gmspec_graph** out);
/* Bit p of pattern is the sign of the p-th unordered pair; n(n-1)/2 <= 64. */
GMSPEC_API gmspec_status gmspec_graph_from_pattern(uint32_t n, uint64_t pattern, gmspec_graph** out);
GMSPEC_API void gmspec_graph_free(gmspec_graph* g);
GMSPEC_API uint32_t gmspec_graph_n(const gmspec_graph* g);
/* Vertices are 0-based. */
GMSPEC_API gmspec_status gmspec_graph_edge(const gmspec_graph* g, uint32_t i, uint32_t j, int* out);
/* Entry of the m-layer Z graph matrix at row tuple `row` and column tuple `col`. */
GMSPEC_API gmspec_status gmspec_matrix_entry(const gmspec_graph* g, uint32_t m, const uint32_t* row,
                                             const uint32_t* col, int* out);
/* tr((M M^T)^q) for the unnormalised matrix, exact, as a decimal string. */
GMSPEC_API gmspec_status gmspec_trace_power_exact(const gmspec_graph* g, uint32_t m, uint32_t q,
                                                  char** out_decimal);
/* Exact average of tr((M M^T)^q) over all graphs on n vertices, "p" or "p/q". */
GMSPEC_API gmspec_status gmspec_exact_expected_trace(uint32_t m, uint32_t q, uint32_t n,
                                                     char** out_rational);

/* threads = 0 uses the hardware concurrency. */
GMSPEC_API gmspec_status gmspec_empirical_trace_moment(uint32_t m, uint32_t q, uint32_t n,
                                                       uint32_t reps, uint64_t seed,
                                                       uint32_t threads, double* out);
/* out[q-1] for q = 1..q_max, all from one decomposition per replicate. */
GMSPEC_API gmspec_status gmspec_empirical_trace_moments(uint32_t m, uint32_t n, uint32_t q_max,
                                                        uint32_t reps, uint64_t seed,
                                                        uint32_t threads, double* out);

typedef struct gmspec_spectrum_sample gmspec_spectrum_sample;

GMSPEC_API gmspec_status gmspec_spectrum_sample_create(uint32_t m, uint32_t n, uint32_t reps,
                                                       uint32_t bins, uint64_t seed,
                                                       uint32_t threads,
                                                       gmspec_spectrum_sample** out);
GMSPEC_API void gmspec_spectrum_sample_free(gmspec_spectrum_sample* s);
GMSPEC_API size_t gmspec_spectrum_sample_bin_count(const gmspec_spectrum_sample* s);
GMSPEC_API gmspec_status gmspec_spectrum_sample_bin(const gmspec_spectrum_sample* s, size_t i,
                                                    double* lo, double* hi, uint64_t* count,
                                                    double* density);
GMSPEC_API size_t gmspec_spectrum_sample_value_count(const gmspec_spectrum_sample* s);
/* Pooled singular values, ascending; capacity must be >= value_count. */
GMSPEC_API gmspec_status gmspec_spectrum_sample_values(const gmspec_spectrum_sample* s, double* out,
                                                       size_t capacity);
/* sup |F_n - F| against the m = 2 limiting distribution. */
GMSPEC_API gmspec_status gmspec_spectrum_sample_ks_z(const gmspec_spectrum_sample* s, double* out);
/* NULL when the sample is not degenerate. */
GMSPEC_API const char* gmspec_spectrum_sample_warning(const gmspec_spectrum_sample* s);

/* ---- constraint graphs ------------------------------------------------ */

typedef struct gmspec_enumeration_options {
  uint32_t threads; /* 0 = hardware concurrency */
  int check_structure;
  int keep_partitions;
  int allow_slow; /* raises the vertex limit from 12 to 16 */
} gmspec_enumeration_options;

typedef struct gmspec_dominance gmspec_dominance;

GMSPEC_API void gmspec_enumeration_options_init(gmspec_enumeration_options* options);
/* options may be NULL for defaults. Fails with GMSPEC_ERR_INFEASIBLE above the vertex limit. */
GMSPEC_API gmspec_status gmspec_enumerate_dominant(uint32_t m, uint32_t q,
                                                   const gmspec_enumeration_options* options,
                                                   gmspec_dominance** out);
GMSPEC_API void gmspec_dominance_free(gmspec_dominance* d);
GMSPEC_API uint64_t gmspec_dominance_count(const gmspec_dominance* d);
GMSPEC_API uint64_t gmspec_dominance_leaves_visited(const gmspec_dominance* d);
/* Number of stored partitions (keep_partitions). */
GMSPEC_API size_t gmspec_dominance_partition_count(const gmspec_dominance* d);
/* JSON array of blocks of vertex labels. */
GMSPEC_API gmspec_status gmspec_dominance_partition_json(const gmspec_dominance* d, size_t i,
                                                         char** out_json);
GMSPEC_API size_t gmspec_dominance_violation_count(const gmspec_dominance* d);
/* {"predicates": [...], "partition": [[...], ...]} */
GMSPEC_API gmspec_status gmspec_dominance_violation_json(const gmspec_dominance* d, size_t i,
                                                         char** out_json);

GMSPEC_API gmspec_status gmspec_min_nonzero_edge_count(uint32_t m, uint32_t q, uint32_t* out);
/* sum_C N(C) val(C) as a decimal string. */
GMSPEC_API gmspec_status gmspec_expected_trace_from_partitions(uint32_t m, uint32_t q, uint32_t n,
                                                               char** out_decimal);

/* ---- limiting densities and ODEs -------------------------------------- */

/* Spectral edge a for m in {2,3}. */
GMSPEC_API gmspec_status gmspec_edge_constant(uint32_t m, double* out_a);
GMSPEC_API gmspec_status gmspec_density_z(double x, double* out);
GMSPEC_API gmspec_status gmspec_density_z_complex(double x, double* out_re, double* out_im);
GMSPEC_API gmspec_status gmspec_cdf_z(double x, double* out);
/* Integral of x^{2k} times the m = 2 density; split_fraction in (0,1). */
GMSPEC_API gmspec_status gmspec_density_z_moment(int k, double split_fraction, double* out);
/* |residual| / scale of the m = 2 ODE at x, with f'' from central differences
 * of step h applied to the closed-form f'. */
GMSPEC_API gmspec_status gmspec_z_ode_relative_residual(double x, double h, double* out);

typedef enum gmspec_tail_model {
  GMSPEC_TAIL_SQRT = 0,
  GMSPEC_TAIL_FROBENIUS_TWO_TERM = 1,
  GMSPEC_TAIL_LEADING_ORDER_TWO_TERM = 2
} gmspec_tail_model;

typedef enum gmspec_endpoint { GMSPEC_ENDPOINT_ORIGIN = 0, GMSPEC_ENDPOINT_EDGE = 1 } gmspec_endpoint;

typedef struct gmspec_density_table gmspec_density_table;

/* m = 2 always uses the square-root tail. mutate_fprime selects the
 * alternative f' coefficient 177x^2 - 192x for m = 3. */
GMSPEC_API gmspec_status gmspec_solve_ode(uint32_t m, double epsilon, gmspec_tail_model tail,
                                          int mutate_fprime, gmspec_density_table** out);
GMSPEC_API void gmspec_density_table_free(gmspec_density_table* t);
GMSPEC_API double gmspec_density_table_a(const gmspec_density_table* t);
GMSPEC_API double gmspec_density_table_normalization(const gmspec_density_table* t);
GMSPEC_API gmspec_status gmspec_density_table_eval(const gmspec_density_table* t, double x,
                                                   double* out);
GMSPEC_API gmspec_status gmspec_density_table_moment(const gmspec_density_table* t, int k,
                                                     double* out);
/* x_i = a i/(points+1), i = 1..points. */
GMSPEC_API gmspec_status gmspec_density_table_sample(const gmspec_density_table* t, size_t points,
                                                     double* out_x, double* out_f);
/* Log-log slope against the distance to the endpoint over [lo, hi]. */
GMSPEC_API gmspec_status gmspec_density_table_exponent(const gmspec_density_table* t,
                                                       gmspec_endpoint end, double lo, double hi,
                                                       double* out);
/* sup |table - closed-form m = 2 density| over [lo, hi]. */
GMSPEC_API gmspec_status gmspec_density_table_sup_distance_z(const gmspec_density_table* t,
                                                             double lo, double hi, double* out);
/* Finite-difference relative residual of the table in the m-layer ODE. */
GMSPEC_API gmspec_status gmspec_density_table_residual(const gmspec_density_table* t, uint32_t m,
                                                       double x, double h, double* out);

/* ---- self-checks ------------------------------------------------------ */

typedef struct gmspec_verify_options {
  const char* suite; /* combinatorics | graph_matrix | constraint_graphs | spectrum | all */
  int allow_slow;
  int mutate_z3_fprime;
  double split_fraction;
  uint32_t threads;
  uint64_t seed;
} gmspec_verify_options;

GMSPEC_API void gmspec_verify_options_init(gmspec_verify_options* options);
/* Runs the suite; *out_passed is 1 iff every check passed. The JSON report is
 * returned even when checks fail. */
GMSPEC_API gmspec_status gmspec_verify(const gmspec_verify_options* options, char** out_report_json,
                                       int* out_passed);

#ifdef __cplusplus
}
#endif

#endif
