#ifndef SCHATTEN_H
#define SCHATTEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SchattenStatus {
  SCHATTEN_STATUS_OK = 0,
  SCHATTEN_STATUS_NULL_POINTER = 1,
  SCHATTEN_STATUS_INVALID_ARGUMENT = 2,
  SCHATTEN_STATUS_PRECONDITION = 3,
  SCHATTEN_STATUS_NUMERICAL = 4,
  SCHATTEN_STATUS_BUFFER_TOO_SMALL = 5,
  SCHATTEN_STATUS_PANIC = 6,
} SchattenStatus;

typedef enum SchattenAlgebra {
  SCHATTEN_ALGEBRA_REAL = 0,
  SCHATTEN_ALGEBRA_COMPLEX = 1,
  SCHATTEN_ALGEBRA_QUATERNION = 2,
} SchattenAlgebra;

typedef enum SchattenMapKind {
  SCHATTEN_MAP_KIND_DIAG = 0,
  SCHATTEN_MAP_KIND_CORNER = 1,
  SCHATTEN_MAP_KIND_SUM_DIFF = 2,
  SCHATTEN_MAP_KIND_FIRST_ROW = 3,
  SCHATTEN_MAP_KIND_VEC = 4,
  SCHATTEN_MAP_KIND_S2_SP = 5,
  SCHATTEN_MAP_KIND_CUBATURE243 = 6,
} SchattenMapKind;

typedef enum SchattenVerdict {
  SCHATTEN_VERDICT_CONSISTENT = 0,
  SCHATTEN_VERDICT_FAILS_SCALAR_IDENTITY = 1,
  SCHATTEN_VERDICT_FAILS_D2_DIVERGENCE = 2,
  SCHATTEN_VERDICT_FAILS_D2_NONZERO = 3,
  SCHATTEN_VERDICT_INCONCLUSIVE = 4,
} SchattenVerdict;

/**
 * Opaque linear map between ℓ_p / Schatten spaces.
 */
typedef struct SchattenEmbedding SchattenEmbedding;

/**
 * Opaque complex matrix.
 */
typedef struct SchattenMatrix SchattenMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a successful call.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *schatten_last_error_message(void);

/**
 * Builds a `rows × cols` matrix from row-major real parts and optional imaginary parts
 * (`im` may be null).
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `rows * cols` doubles; `out` must be writable.
 */
enum SchattenStatus schatten_matrix_new(size_t rows,
                                        size_t cols,
                                        const double *re,
                                        const double *im,
                                        struct SchattenMatrix **out_matrix);

/**
 * # Safety
 * `matrix` must be null or a handle from `schatten_matrix_new` not yet freed.
 */
void schatten_matrix_free(struct SchattenMatrix *matrix);

/**
 * # Safety
 * `matrix` must be null or a live handle.
 */
size_t schatten_matrix_rows(const struct SchattenMatrix *matrix);

/**
 * # Safety
 * `matrix` must be null or a live handle.
 */
size_t schatten_matrix_cols(const struct SchattenMatrix *matrix);

/**
 * # Safety
 * `matrix` must be a live handle; `re` and `im` must be writable.
 */
enum SchattenStatus schatten_matrix_get(const struct SchattenMatrix *matrix,
                                        size_t row,
                                        size_t col,
                                        double *re,
                                        double *im);

/**
 * Schatten p-norm; `p = INFINITY` gives the operator norm.
 *
 * # Safety
 * `matrix` must be a live handle; `out_norm` must be writable.
 */
enum SchattenStatus schatten_norm_p(const struct SchattenMatrix *matrix,
                                    double p,
                                    double *out_norm);

/**
 * Writes the `min(rows, cols)` singular values in descending order. `*out_len` receives the
 * count; with a buffer shorter than that, nothing is written and `BUFFER_TOO_SMALL` returned.
 *
 * # Safety
 * `matrix` must be a live handle; `values` must hold `capacity` doubles; `out_len` writable.
 */
enum SchattenStatus schatten_singular_values(const struct SchattenMatrix *matrix,
                                             double *values,
                                             size_t capacity,
                                             size_t *out_len);

/**
 * `d²/dt² ‖A + tB‖_p^p` at `t = 0` by the trace formula (finite `p ≥ 2`).
 *
 * # Safety
 * `a`, `b` must be live handles; `out_value` must be writable.
 */
enum SchattenStatus schatten_second_derivative(const struct SchattenMatrix *a,
                                               const struct SchattenMatrix *b,
                                               double p,
                                               double *out_value);

/**
 * Central second difference of `t ↦ ‖A + tB‖_p^p` at 0 with step `h`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out_value` must be writable.
 */
enum SchattenStatus schatten_fd_second_derivative(const struct SchattenMatrix *a,
                                                  const struct SchattenMatrix *b,
                                                  double p,
                                                  double h,
                                                  double *out_value);

/**
 * Divided difference of `|x|^p` over `nodes` (repeated nodes allowed up to the symbol's order).
 *
 * # Safety
 * `nodes` must point to `node_count` doubles; `out_value` must be writable.
 */
enum SchattenStatus schatten_divdiff_abs_pow(double p,
                                             const double *nodes,
                                             size_t node_count,
                                             double *out_value);

/**
 * Divided difference of `Σ coeffs[k] x^k` over `nodes`.
 *
 * # Safety
 * `coeffs` and `nodes` must point to the given counts of doubles; `out_value` writable.
 */
enum SchattenStatus schatten_divdiff_polynomial(const double *coeffs,
                                                size_t coeff_count,
                                                const double *nodes,
                                                size_t node_count,
                                                double *out_value);

/**
 * Λ(m, p) for even `p`. Values beyond `UINT64_MAX` report `NUMERICAL`.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum SchattenStatus schatten_lambda_bound(uint64_t m,
                                          uint64_t p,
                                          enum SchattenAlgebra algebra,
                                          uint64_t *out_value);

/**
 * Built-in map by kind. Unused parameters are ignored: `Corner` uses `m`, `n`, `p`;
 * `SumDiff` uses `n`; `Vec` uses `m`; `Cubature243` uses none; the rest use `m` and `p`.
 *
 * # Safety
 * `out_embedding` must be writable.
 */
enum SchattenStatus schatten_embedding_new(enum SchattenMapKind kind,
                                           size_t m,
                                           size_t n,
                                           double p,
                                           struct SchattenEmbedding **out_embedding);

/**
 * Copy of `embedding` with its domain exponent set to `q` and codomain exponent to `p`.
 *
 * # Safety
 * `embedding` must be a live handle; `out_embedding` must be writable.
 */
enum SchattenStatus schatten_embedding_with_exponents(const struct SchattenEmbedding *embedding,
                                                      double q,
                                                      double p,
                                                      struct SchattenEmbedding **out_embedding);

/**
 * # Safety
 * `embedding` must be null or a handle not yet freed.
 */
void schatten_embedding_free(struct SchattenEmbedding *embedding);

/**
 * Sampling isometry check: basis vectors, the all-ones vector and `samples` seeded
 * Gaussian vectors.
 *
 * # Safety
 * `embedding` must be a live handle; `out_max_residual` and `out_pass` must be writable.
 */
enum SchattenStatus schatten_verify_isometry(const struct SchattenEmbedding *embedding,
                                             size_t samples,
                                             uint64_t seed,
                                             double tol,
                                             double *out_max_residual,
                                             bool *out_pass);

/**
 * Obstruction check of a candidate `ℓ_q² → S_p^n` on the default grid.
 *
 * # Safety
 * `embedding` must be a live handle; `out_verdict` and `out_max_residual` must be writable.
 */
enum SchattenStatus schatten_check_candidate(const struct SchattenEmbedding *embedding,
                                             double tol,
                                             enum SchattenVerdict *out_verdict,
                                             double *out_max_residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHATTEN_H */
