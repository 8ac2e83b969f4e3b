#ifndef ALTDIAM_H
#define ALTDIAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum AltdiamStatus {
  ALTDIAM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ALTDIAM_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range, e.g. an unknown order code.
   */
  ALTDIAM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Text or JSON input could not be parsed.
   */
  ALTDIAM_STATUS_PARSE_ERROR = 3,
  /**
   * The input does not describe a bijection of the stated shape.
   */
  ALTDIAM_STATUS_INVALID_PERMUTATION = 4,
  /**
   * A matrix that must be invertible is not, or the field is invalid.
   */
  ALTDIAM_STATUS_LINEAR_ALGEBRA = 5,
  /**
   * The instance exceeds an enumeration limit.
   */
  ALTDIAM_STATUS_INSTANCE_TOO_LARGE = 6,
  /**
   * An internal consistency check failed.
   */
  ALTDIAM_STATUS_INTERNAL = 7,
} AltdiamStatus;

/**
 * Stage pattern of a three-stage factorization.
 */
typedef enum AltdiamOrder {
  ALTDIAM_ORDER_RLR = 0,
  ALTDIAM_ORDER_LRL = 1,
} AltdiamOrder;

/**
 * An alternating three-stage factorization of a grid permutation.
 */
typedef struct AltdiamDecomposition AltdiamDecomposition;

/**
 * A factorization of an invertible matrix into block stages.
 */
typedef struct AltdiamLinearDecomposition AltdiamLinearDecomposition;

/**
 * A square matrix over a prime field.
 */
typedef struct AltdiamMatrix AltdiamMatrix;

/**
 * A permutation of an `m x n` grid.
 */
typedef struct AltdiamPermutation AltdiamPermutation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *altdiam_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void altdiam_string_free(char *s);

/**
 * Builds a permutation from its image table: `table[a * n + b]` is the
 * linear index `a2 * n + b2` of the image of `(a, b)`; `len` must be `m * n`.
 *
 * # Safety
 * `table` must point to `len` readable values and `out` must be writable.
 */
enum AltdiamStatus altdiam_permutation_from_table(size_t m,
                                                  size_t n,
                                                  const size_t *table,
                                                  size_t len,
                                                  struct AltdiamPermutation **out);

/**
 * Parses a permutation from its JSON or text form.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` writable.
 */
enum AltdiamStatus altdiam_permutation_parse(const char *text, struct AltdiamPermutation **out);

/**
 * # Safety
 * `p` must be null or a live handle from this library.
 */
void altdiam_permutation_free(struct AltdiamPermutation *p);

/**
 * Writes the grid dimensions.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AltdiamStatus altdiam_permutation_dims(const struct AltdiamPermutation *p,
                                            size_t *m,
                                            size_t *n);

/**
 * Image of the cell `(a, b)`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AltdiamStatus altdiam_permutation_apply(const struct AltdiamPermutation *p,
                                             size_t a,
                                             size_t b,
                                             size_t *a_out,
                                             size_t *b_out);

/**
 * JSON form `{"m","n","map"}`; free the result with [`altdiam_string_free`].
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum AltdiamStatus altdiam_permutation_to_json(const struct AltdiamPermutation *p, char **out);

/**
 * Factors `p` into three alternating stages; `order` is an [`AltdiamOrder`].
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum AltdiamStatus altdiam_decompose(const struct AltdiamPermutation *p,
                                     uint32_t order,
                                     struct AltdiamDecomposition **out);

/**
 * Parses a decomposition from JSON.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` writable.
 */
enum AltdiamStatus altdiam_decomposition_parse(const char *json, struct AltdiamDecomposition **out);

/**
 * # Safety
 * `d` must be null or a live handle from this library.
 */
void altdiam_decomposition_free(struct AltdiamDecomposition *d);

/**
 * Number of stages, or 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
size_t altdiam_decomposition_stage_count(const struct AltdiamDecomposition *d);

/**
 * JSON form `{"order","m","n","stages"}`.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum AltdiamStatus altdiam_decomposition_to_json(const struct AltdiamDecomposition *d, char **out);

/**
 * Sets `*ok` to whether `d` certifies `p`. A mismatch is not an error: the
 * call returns `Ok` with `*ok = false` and describes the first mismatch in
 * [`altdiam_last_error`].
 *
 * # Safety
 * All pointers must be valid.
 */
enum AltdiamStatus altdiam_verify(const struct AltdiamDecomposition *d,
                                  const struct AltdiamPermutation *p,
                                  bool *ok);

/**
 * Builds a `rows x cols` matrix over `F_p` from row-major entries, which
 * are reduced modulo `p`.
 *
 * # Safety
 * `entries` must point to `rows * cols` readable values and `out` be writable.
 */
enum AltdiamStatus altdiam_matrix_new(uint64_t p,
                                      size_t rows,
                                      size_t cols,
                                      const uint64_t *entries,
                                      struct AltdiamMatrix **out);

/**
 * # Safety
 * `m` must be null or a live handle from this library.
 */
void altdiam_matrix_free(struct AltdiamMatrix *m);

/**
 * Factors an invertible matrix into block stages for the split `m + n`;
 * `order` is an [`AltdiamOrder`].
 *
 * # Safety
 * `mat` must be a live handle and `out` writable.
 */
enum AltdiamStatus altdiam_decompose_linear(const struct AltdiamMatrix *mat,
                                            size_t split_m,
                                            size_t split_n,
                                            uint32_t order,
                                            struct AltdiamLinearDecomposition **out);

/**
 * # Safety
 * `d` must be null or a live handle from this library.
 */
void altdiam_linear_decomposition_free(struct AltdiamLinearDecomposition *d);

/**
 * JSON form `{"order","split","stages"}`.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum AltdiamStatus altdiam_linear_decomposition_to_json(const struct AltdiamLinearDecomposition *d,
                                                        char **out);

/**
 * Sets `*ok` to whether the stages have the right block shapes and
 * multiply to `mat`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AltdiamStatus altdiam_linear_verify(const struct AltdiamLinearDecomposition *d,
                                         const struct AltdiamMatrix *mat,
                                         bool *ok);

/**
 * Census report of `Sym(m x n)` as JSON, for `m * n <= 9`.
 *
 * # Safety
 * `out` must be writable.
 */
enum AltdiamStatus altdiam_census_json(size_t m, size_t n, size_t threads, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALTDIAM_H */
