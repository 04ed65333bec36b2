#ifndef QSAT_H
#define QSAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QsatErrorCode {
  QSAT_ERROR_CODE_OK = 0,
  QSAT_ERROR_CODE_NULL_POINTER = 1,
  QSAT_ERROR_CODE_INVALID_ARGUMENT = 2,
  QSAT_ERROR_CODE_INVALID_GRAPH = 3,
  QSAT_ERROR_CODE_LIMIT_EXCEEDED = 4,
  QSAT_ERROR_CODE_COMPUTATION_FAILED = 5,
  QSAT_ERROR_CODE_PANIC = 6,
} QsatErrorCode;

typedef enum QsatEnsembleMode {
  QSAT_ENSEMBLE_MODE_BINOMIAL = 0,
  QSAT_ENSEMBLE_MODE_FIXED_COUNT = 1,
} QsatEnsembleMode;

typedef enum QsatProjectorForm {
  QSAT_PROJECTOR_FORM_GENERIC = 0,
  QSAT_PROJECTOR_FORM_PRODUCT = 1,
} QsatProjectorForm;

typedef enum QsatVerdict {
  QSAT_VERDICT_SAT = 0,
  QSAT_VERDICT_UNSAT = 1,
  QSAT_VERDICT_UNDECIDED = 2,
} QsatVerdict;

/**
 * Opaque interaction graph.
 */
typedef struct QsatGraph QsatGraph;

/**
 * Opaque set of rank-1 projectors, one per clause of a graph.
 */
typedef struct QsatProjectors QsatProjectors;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *qsat_last_error_message(void);

/**
 * Builds a graph from `num_clauses * k` qubit indices laid out clause by clause.
 *
 * # Safety
 * `clauses` must point to `num_clauses * k` readable values (or be NULL when
 * `num_clauses` is 0) and `out` must be writable.
 */
enum QsatErrorCode qsat_graph_new(size_t n_qubits,
                                  size_t k,
                                  const size_t *clauses,
                                  size_t num_clauses,
                                  struct QsatGraph **out);

/**
 * Parses the graph JSON format `{"n_qubits":..,"k":..,"clauses":[[..],..]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum QsatErrorCode qsat_graph_from_json(const char *json, struct QsatGraph **out);

/**
 * Samples a random k-uniform graph with clause density `alpha`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QsatErrorCode qsat_graph_sample(size_t n_qubits,
                                     size_t k,
                                     double alpha,
                                     enum QsatEnsembleMode mode,
                                     uint64_t seed,
                                     struct QsatGraph **out);

/**
 * One of the bundled N = M = 10 instances, selected by 'a', 'b' or 'c'.
 *
 * # Safety
 * `out` must be writable.
 */
enum QsatErrorCode qsat_reference_instance(char letter, struct QsatGraph **out);

/**
 * # Safety
 * `g` must come from a qsat constructor and not be used afterwards.
 */
void qsat_graph_free(struct QsatGraph *g);

/**
 * Number of qubits, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live graph handle.
 */
size_t qsat_graph_n_qubits(const struct QsatGraph *g);

/**
 * Number of clauses, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live graph handle.
 */
size_t qsat_graph_num_clauses(const struct QsatGraph *g);

/**
 * Serializes the graph; release the string with `qsat_string_free`.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum QsatErrorCode qsat_graph_to_json(const struct QsatGraph *g, char **out);

/**
 * # Safety
 * `s` must come from a qsat function returning an owned string.
 */
void qsat_string_free(char *s);

/**
 * Whether every clause can be matched to a distinct qubit of its own.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum QsatErrorCode qsat_graph_is_coverable(const struct QsatGraph *g, bool *out);

/**
 * Exact number of dimer coverings; fails above `limit` active qubits or
 * when the count exceeds 64 bits.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum QsatErrorCode qsat_graph_count_coverings(const struct QsatGraph *g,
                                              size_t limit,
                                              uint64_t *out);

/**
 * Number of clauses in the hypercore.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum QsatErrorCode qsat_graph_core_clauses(const struct QsatGraph *g, size_t *out);

/**
 * Whether the clause-qubit incidence matrix has full row rank over GF(2).
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum QsatErrorCode qsat_graph_gf2_surjective(const struct QsatGraph *g, bool *out);

/**
 * Draws one random projector per clause of `g`.
 *
 * # Safety
 * `g` must be a live graph handle and `out` writable.
 */
enum QsatErrorCode qsat_projectors_sample(const struct QsatGraph *g,
                                          uint64_t seed,
                                          enum QsatProjectorForm form,
                                          struct QsatProjectors **out);

/**
 * # Safety
 * `p` must come from `qsat_projectors_sample` and not be used afterwards.
 */
void qsat_projectors_free(struct QsatProjectors *p);

/**
 * Dimension of ker H by dense diagonalization. `tol <= 0` selects the
 * default relative threshold. `marginal` reports an unstable count.
 *
 * # Safety
 * `g`, `p` must be live handles (with `p` sampled on `g`); outputs writable.
 */
enum QsatErrorCode qsat_kernel_dimension(const struct QsatGraph *g,
                                         const struct QsatProjectors *p,
                                         double tol,
                                         size_t dense_limit,
                                         size_t *dimension,
                                         bool *marginal);

/**
 * Lanczos SAT/UNSAT decision with default tolerances.
 *
 * # Safety
 * `g`, `p` must be live handles (with `p` sampled on `g`); `out` writable.
 */
enum QsatErrorCode qsat_decide_sat(const struct QsatGraph *g,
                                   const struct QsatProjectors *p,
                                   size_t max_iters,
                                   uint64_t seed,
                                   enum QsatVerdict *out);

/**
 * Root of the sunflower entropy S(k, α) in α.
 *
 * # Safety
 * `out` must be writable.
 */
enum QsatErrorCode qsat_sunflower_alpha_upper(size_t k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSAT_H */
