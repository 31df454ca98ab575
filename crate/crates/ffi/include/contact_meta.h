#ifndef CONTACT_META_H
#define CONTACT_META_H

/* Generated by cbindgen; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status codes.
 */
typedef enum CpmStatus {
  CPM_STATUS_OK = 0,
  CPM_STATUS_NULL_POINTER = 1,
  CPM_STATUS_INVALID_PARAMETER = 2,
  CPM_STATUS_BUDGET_EXCEEDED = 3,
  CPM_STATUS_NO_UNCENSORED_SAMPLES = 4,
  CPM_STATUS_INAPPLICABLE = 5,
  CPM_STATUS_PARSE_ERROR = 6,
  CPM_STATUS_IO_ERROR = 7,
  CPM_STATUS_PANIC = 8,
} CpmStatus;

/**
 * Opaque graph handle.
 */
typedef struct CpmGraph CpmGraph;

/**
 * Library version as a static NUL-terminated string.
 */
const char *cpm_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * always NUL-terminated when `len > 0`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t cpm_last_error_message(char *buf, size_t len);

/**
 * Generates `G(n, p)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CpmStatus cpm_graph_erdos_renyi(size_t n, double p, uint64_t seed, struct CpmGraph **out);

/**
 * Generates a configuration-model graph. `dist` is `constant:d`,
 * `poisson:mu` or `empirical:p0,p1,...`.
 *
 * # Safety
 * `dist` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum CpmStatus cpm_graph_configuration(size_t n,
                                       const char *dist,
                                       uint64_t seed,
                                       struct CpmGraph **out);

/**
 * Builds a graph from `m` edges given as parallel arrays; repeated pairs add
 * up to a multiplicity.
 *
 * # Safety
 * `us` and `vs` must each be valid for `m` reads; `out` valid for writes.
 */
enum CpmStatus cpm_graph_from_edges(size_t n,
                                    const size_t *us,
                                    const size_t *vs,
                                    size_t m,
                                    struct CpmGraph **out);

/**
 * Reads the edge-list format from a file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` valid for writes.
 */
enum CpmStatus cpm_graph_read(const char *path, struct CpmGraph **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void cpm_graph_free(struct CpmGraph *g);

/**
 * # Safety
 * `g` must be a live handle; `out` valid for writes.
 */
enum CpmStatus cpm_graph_node_count(const struct CpmGraph *g, size_t *out);

/**
 * Number of edges counted with multiplicity.
 *
 * # Safety
 * `g` must be a live handle; `out` valid for writes.
 */
enum CpmStatus cpm_graph_edge_count(const struct CpmGraph *g, uint64_t *out);

/**
 * Edges between `nodes[0..len]` and the rest of the graph.
 *
 * # Safety
 * `g` live; `nodes` valid for `len` reads; `out` valid for writes.
 */
enum CpmStatus cpm_graph_cut_size(const struct CpmGraph *g,
                                  const size_t *nodes,
                                  size_t len,
                                  uint64_t *out);

/**
 * Exact minimum cut over all subsets of size `k`, refusing with
 * `BudgetExceeded` when `C(n, k) > budget`. When `witness` is non-null it
 * receives the `k` nodes of a minimizing set.
 *
 * # Safety
 * `g` live; `out` valid for writes; `witness` null or valid for `k` writes.
 */
enum CpmStatus cpm_graph_min_cut(const struct CpmGraph *g,
                                 size_t k,
                                 uint64_t budget,
                                 uint64_t *out,
                                 size_t *witness);

/**
 * Mean extinction time from all-infected over `reps` replications.
 * `t_max <= 0` disables censoring. `censored` receives the number of
 * replications cut off at `t_max`.
 *
 * # Safety
 * `g` live; all out-pointers valid for writes.
 */
enum CpmStatus cpm_simulate_extinction(const struct CpmGraph *g,
                                       double tau,
                                       uint64_t reps,
                                       double t_max,
                                       uint64_t seed,
                                       double *mean,
                                       double *std_error,
                                       uint64_t *censored);

/**
 * `ln P(L = l)` for the mixed-pair count with `n1`, `n2` stubs.
 *
 * # Safety
 * `out` valid for writes.
 */
enum CpmStatus cpm_ln_mixed_pair_prob(uint64_t n1, uint64_t n2, uint64_t l, double *out);

/**
 * Upper bound on `P(L <= l)`.
 *
 * # Safety
 * `out` valid for writes.
 */
enum CpmStatus cpm_tail_bound(uint64_t n1, uint64_t n2, uint64_t l, double *out);

/**
 * # Safety
 * `out` valid for writes.
 */
enum CpmStatus cpm_phi(double a1, double a2, double rho, double *out);

/**
 * `ln E[T]` from all-infected for the contact process on `K_n` with
 * per-edge rate `lambda/n`, solved exactly.
 *
 * # Safety
 * `out` valid for writes.
 */
enum CpmStatus cpm_complete_graph_log_extinction(size_t n, double lambda, double *out);

/**
 * Sparse Erdős–Rényi threshold `τ₀(σ)` for `p = σ/N`.
 *
 * # Safety
 * `out` valid for writes.
 */
enum CpmStatus cpm_sparse_er_tau0(double sigma, double *out);

/**
 * Certified lower estimate of `μ₀` for a degree law; the infection
 * threshold is `1/μ₀`. `gamma_points` of 0 selects the default grid.
 *
 * # Safety
 * `dist` must be a NUL-terminated string; `out` valid for writes.
 */
enum CpmStatus cpm_mu0(const char *dist, size_t gamma_points, double *out);

#endif  /* CONTACT_META_H */
