#ifndef GROUPCODE_H
#define GROUPCODE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GcStatus {
  GC_STATUS_OK = 0,
  GC_STATUS_INVALID_ARGUMENT = 1,
  GC_STATUS_NULL_POINTER = 2,
  GC_STATUS_NUMERICAL = 3,
  GC_STATUS_INTERNAL = 4,
  GC_STATUS_BUFFER_TOO_SMALL = 5,
} GcStatus;

// Opaque handle to a found code.
typedef struct GcCode GcCode;

typedef struct GcCountEstimates {
  uint64_t order;
  uint32_t dim;
  // `C(M/2, n/2)`, or 0 on overflow.
  uint64_t binomial;
  // `floor((M/2)^k / phi(M))`, or 0 on overflow.
  uint64_t adam_estimate;
  uint64_t tested_cyclic;
  uint64_t tested_commutative;
  uint64_t raw_count;
} GcCountEstimates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// The pointer stays valid until the next call on the same thread.
const char *gc_last_error(void);

// Library version as a static NUL-terminated string.
const char *gc_version(void);

// Best code of order `order` in even dimension `dim`. `threads = 0` uses
// the default pool.
//
// # Safety
// `out` must be valid for writing one pointer.
enum GcStatus gc_search(uint64_t order, uint32_t dim, uint32_t threads, struct GcCode **out);

// # Safety
// `code` must come from `gc_search` and not be freed; `out` must be writable.
enum GcStatus gc_code_min_distance(const struct GcCode *code, double *out);

// Raw and tested candidate counts of the search that produced `code`.
//
// # Safety
// As for `gc_code_min_distance`.
enum GcStatus gc_code_counts(const struct GcCode *code, uint64_t *raw, uint64_t *tested);

// Radii `δ_1..δ_k` of the initial vector.
//
// # Safety
// `code` valid; `buf` writable for `len` doubles; `needed` writable.
enum GcStatus gc_code_initial_vector(const struct GcCode *code,
                                     double *buf,
                                     size_t len,
                                     size_t *needed);

// Invariant factors, decreasing, factors of 1 omitted.
//
// # Safety
// As for `gc_code_initial_vector`.
enum GcStatus gc_code_factors(const struct GcCode *code, uint64_t *buf, size_t len, size_t *needed);

// Exponent vector of generator `index`, paired with factor `index`.
//
// # Safety
// As for `gc_code_initial_vector`.
enum GcStatus gc_code_generator(const struct GcCode *code,
                                size_t index,
                                uint64_t *buf,
                                size_t len,
                                size_t *needed);

// # Safety
// `code` must come from `gc_search` (or be null) and is invalid afterwards.
void gc_code_free(struct GcCode *code);

// Minimum distance of the code generated by `count` exponent vectors of
// length `blocks` (row-major in `generators`). With `deltas` null the LP
// optimum is used and its radii are written to `deltas_out` (if non-null,
// `blocks` doubles).
//
// # Safety
// `generators` readable for `count * blocks` values; `deltas` null or
// readable for `blocks`; `deltas_out` null or writable for `blocks`;
// `distance` writable.
enum GcStatus gc_evaluate(uint64_t order,
                          const int64_t *generators,
                          size_t count,
                          size_t blocks,
                          const double *deltas,
                          double *deltas_out,
                          double *distance);

// # Safety
// `out` writable.
enum GcStatus gc_count_estimates(uint64_t order, uint32_t dim, struct GcCountEstimates *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GROUPCODE_H */
