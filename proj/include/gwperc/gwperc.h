// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the gwperc library: critical percolation on seeded
 * Galton-Watson trees.
 *
 * Objects are opaque handles released with the matching *_free call.
 * Every fallible call returns a gwp_status; on failure the message is
 * available from gwp_last_error() on the calling thread until the next
 * failing call. Output arrays are allocated by the caller with the
 * documented lengths. Functions taking a `threads` argument accept 0 for
 * "all hardware threads"; their results never depend on it. */

#ifndef GWPERC_GWPERC_H
#define GWPERC_GWPERC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GWP_API __declspec(dllexport)
#else
#define GWP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gwp_status {
  GWP_OK = 0,
  GWP_E_INVALID_ARGUMENT = 1,
  GWP_E_PRECONDITION = 2,
  GWP_E_PARSE = 3,
  GWP_E_BUDGET = 4,
  GWP_E_IO = 5,
  GWP_E_INTERNAL = 6,
  GWP_E_BUFFER_TOO_SMALL = 7
} gwp_status;

typedef struct gwp_offspring gwp_offspring;
typedef struct gwp_tree gwp_tree;

GWP_API const char* gwp_version(void);
GWP_API const char* gwp_last_error(void);
GWP_API const char* gwp_status_name(gwp_status status);

/* ---- offspring laws ---- */

typedef struct gwp_params {
  double mu;
  double pc;
  double phi2;       /* E[Z(Z-1)] */
  double lambda;     /* 2 / (pc^2 phi2) */
  double lambda_alt; /* 2 mu^2 / E[Z(Z-1)] */
} gwp_params;

/* Spec strings: det:d, unif:a:b, pmf:p1,p2,..., geom:q, poisplus:theta. */
GWP_API gwp_status gwp_offspring_parse(const char* spec, gwp_offspring** out);
GWP_API void gwp_offspring_free(gwp_offspring* law);
/* Canonical name. Writes at most cap bytes including the terminator;
 * *needed (if not NULL) receives the full length plus one. */
GWP_API gwp_status gwp_offspring_name(const gwp_offspring* law, char* buf, size_t cap, size_t* needed);
/* c: (k_max+1)^2 entries, c[k*(k_max+1)+j] = c_{k,j}; m: 2*k_max+1 entries. Either may be NULL. */
GWP_API gwp_status gwp_offspring_params(const gwp_offspring* law, int k_max, gwp_params* out, double* c,
                                        double* m);
/* One draw of Z; *rng_state is a SplitMix64 state advanced in place. */
GWP_API gwp_status gwp_offspring_sample(const gwp_offspring* law, uint64_t* rng_state, uint32_t* out);
/* pmf of Bin(Z, pc) from 0. *len receives the support length. */
GWP_API gwp_status gwp_annealed_offspring(const gwp_offspring* law, double* pmf, size_t cap, size_t* len);

/* ---- trees ---- */

typedef struct gwp_tree_info {
  int depth;
  int arena_depth; /* levels materialized in memory */
  uint64_t seed;
  double mu;
  double w_bar;    /* max of W_k over k <= depth */
  uint64_t arena_size;
} gwp_tree_info;

GWP_API gwp_status gwp_tree_generate(const gwp_offspring* law, uint64_t seed, int depth, gwp_tree** out);
GWP_API gwp_status gwp_tree_deepen(gwp_tree* tree, int new_depth);
GWP_API void gwp_tree_free(gwp_tree* tree);
GWP_API gwp_status gwp_tree_info_get(const gwp_tree* tree, gwp_tree_info* out);
GWP_API gwp_status gwp_tree_spec(const gwp_tree* tree, char* buf, size_t cap, size_t* needed);
GWP_API gwp_status gwp_tree_z(const gwp_tree* tree, int n, double* out);
GWP_API gwp_status gwp_tree_w(const gwp_tree* tree, int n, double* out);
/* W_m(v) for the vertex of breadth-first rank `rank` on level `depth`. */
GWP_API gwp_status gwp_tree_w_estimate(const gwp_tree* tree, int depth, uint64_t rank, int lookahead,
                                       double* out);
GWP_API gwp_status gwp_tree_audit(const gwp_tree* tree);
GWP_API gwp_status gwp_tree_save(const gwp_tree* tree, const char* path);
GWP_API gwp_status gwp_tree_load(const char* path, gwp_tree** out);
GWP_API gwp_status gwp_tree_serialize(const gwp_tree* tree, char* buf, size_t cap, size_t* needed);
GWP_API gwp_status gwp_tree_deserialize(const char* text, gwp_tree** out);

/* ---- quenched percolation ---- */

typedef struct gwp_sandwich {
  double lower;
  double value;
  double upper;
  int holds;
} gwp_sandwich;

/* q: n+1 entries. */
GWP_API gwp_status gwp_survival_exact(const gwp_tree* tree, int n, double* q);
/* values: (n+1)*(k+1) entries, values[j*(k+1)+i] = E[binom(|Y_j|, i)]. */
GWP_API gwp_status gwp_moments_exact(const gwp_tree* tree, int n, int k, double* values,
                                     int* precision_warning);
GWP_API gwp_status gwp_sandwich_check(const gwp_tree* tree, int n, gwp_sandwich* out);
GWP_API gwp_status gwp_sandwich_from_estimates(int n, double mean_size, double mean_size_sq,
                                               double survival, double w_bar, double pc,
                                               gwp_sandwich* out);
/* |Y_n| of one run; *rng_state advanced in place. */
GWP_API gwp_status gwp_percolate_once(const gwp_tree* tree, int n, uint64_t* rng_state, uint64_t* size);
/* Arrays of n+1 entries; any may be NULL. */
GWP_API gwp_status gwp_survival_mc(const gwp_tree* tree, int n, uint64_t replicates, uint64_t seed,
                                   int threads, double* q, double* std_error, double* mean_size,
                                   double* mean_size_sq);
/* sizes: `accepted` entries. max_attempts 0 selects the default cap of 1e9. */
GWP_API gwp_status gwp_conditioned_sizes(const gwp_tree* tree, int n, uint64_t accepted, uint64_t seed,
                                         int threads, uint64_t max_attempts, uint64_t* sizes,
                                         uint64_t* attempts);

typedef struct gwp_spread {
  int n;
  int m;
  uint64_t accepted;
  uint64_t attempts;
  double p_multi;
  double p_max;
  double p_max_empirical;
  double frequency_sum;
  double mean_size;
  int low_confidence;
} gwp_spread;

GWP_API gwp_status gwp_spread_diagnostics(const gwp_tree* tree, int n, uint64_t accepted, uint64_t seed,
                                          int threads, uint64_t max_attempts, gwp_spread* out);

/* ---- martingales ---- */

typedef struct gwp_fit {
  double slope;
  double intercept;
  double residual;
  int has_fit;
} gwp_fit;

/* values: n_max+1 entries of M_n^(k). */
GWP_API gwp_status gwp_martingale_trace(const gwp_tree* tree, int n_max, int k, double* values);
/* mean, std_error, l2: n_max entries each (increment n -> n+1). */
GWP_API gwp_status gwp_increment_study(const gwp_offspring* law, int k, int n_max, uint64_t trees,
                                       uint64_t seed, int threads, double* mean, double* std_error,
                                       double* l2, gwp_fit* fit);

/* ---- incipient infinite cluster ---- */

/* spine: n+1 vertex keys, may be NULL. horizon != 0 selects W_{m+n-depth}. */
GWP_API gwp_status gwp_iic_sample(const gwp_tree* tree, int n, int lookahead, int horizon,
                                  uint64_t* rng_state, uint64_t* spine, uint64_t* c_n);
/* scaled: `replicates` entries of c_n / n. */
GWP_API gwp_status gwp_iic_experiment(const gwp_tree* tree, int n, uint64_t replicates, uint64_t seed,
                                      int lookahead, int threads, double* scaled, uint64_t* min_c_n);
/* shape: global breadth-first ids of the cluster restricted to depth <= n. */
GWP_API gwp_status gwp_iic_marginal_exact(const gwp_tree* tree, const uint64_t* shape, size_t len, int n,
                                          int lookahead, double* out);
GWP_API gwp_status gwp_iic_branch_transitions(const gwp_tree* tree, int lookahead, double* probs,
                                              size_t cap, size_t* len);

/* ---- annealed process ---- */

/* q: n_max+1 entries. */
GWP_API gwp_status gwp_annealed_survival(const gwp_offspring* law, int n_max, double* q);
GWP_API gwp_status gwp_annealed_yaglom(const gwp_offspring* law, int n, uint64_t accepted, uint64_t seed,
                                       int threads, double* scaled, uint64_t* attempts);
GWP_API gwp_status gwp_annealed_iic(const gwp_offspring* law, int n, uint64_t replicates, uint64_t seed,
                                    int lookahead, int threads, double* scaled, uint64_t* min_c_n);

/* ---- statistics ---- */

typedef enum gwp_cdf { GWP_CDF_EXP = 0, GWP_CDF_GAMMA2 = 1 } gwp_cdf;

GWP_API gwp_status gwp_cdf_eval(gwp_cdf cdf, double lambda, double x, double* out);
GWP_API gwp_status gwp_ks_distance(const double* sample, size_t len, gwp_cdf cdf, double lambda,
                                   double* out);
GWP_API gwp_status gwp_summary(const double* sample, size_t len, double* mean, double* variance,
                               double* std_error);
GWP_API gwp_status gwp_decay_fit(const double* x, const double* y, size_t len, gwp_fit* out);

/* ---- acceptance suite ---- */

typedef enum gwp_budget { GWP_BUDGET_SMOKE = 0, GWP_BUDGET_FULL = 1 } gwp_budget;

typedef struct gwp_criterion {
  int id;
  const char* name;
  int pass;
  double seconds;
  double limit_seconds; /* 0: none */
  const char* detail;
  size_t metric_count;
  const char* const* metric_names;
  const double* metric_values;
} gwp_criterion;

/* Pointers inside the record are valid only during the callback. */
typedef void (*gwp_criterion_callback)(const gwp_criterion* result, void* user);

GWP_API gwp_status gwp_verify_all(gwp_budget budget, int threads, gwp_criterion_callback callback,
                                  void* user, int* all_pass);
GWP_API gwp_status gwp_verify_one(int id, gwp_budget budget, int threads,
                                  gwp_criterion_callback callback, void* user, int* pass);

#ifdef __cplusplus
}
#endif

#endif /* GWPERC_GWPERC_H */
