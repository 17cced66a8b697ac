/* C interface to the higher-commutator kernel. Generated; do not edit. */

#ifndef HICOMM_H
#define HICOMM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum HicommStatus {
  HICOMM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HICOMM_STATUS_NULL_ARGUMENT = 1,
  /**
   * Malformed input text.
   */
  HICOMM_STATUS_PARSE_ERROR = 2,
  /**
   * Well-formed input that violates a precondition.
   */
  HICOMM_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The cube budget or time limit was exhausted, or an internal cap hit.
   */
  HICOMM_STATUS_BUDGET_EXCEEDED = 4,
  /**
   * The caller's output buffer is too small (the needed size was reported).
   */
  HICOMM_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * A defect in this library, never bad input.
   */
  HICOMM_STATUS_INTERNAL_ERROR = 6,
} HicommStatus;

/**
 * Opaque handle: a finite algebra (universe size plus operation tables).
 */
typedef struct HicommAlgebra HicommAlgebra;

/**
 * Opaque handle: a partition of the algebra's universe.
 */
typedef struct HicommPartition HicommPartition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hicomm_version(void);

/**
 * Message for the most recent failure on the calling thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hicomm_last_error(void);

/**
 * Parse an algebra from its text format (`algebra <name>` / `size <k>` /
 * `op <name> <arity>` followed by the operation table).
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum HicommStatus hicomm_algebra_parse(const char *text, struct HicommAlgebra **out);

/**
 * Look up a built-in corpus algebra by name.
 *
 * # Safety
 * `name` must be NUL-terminated; `out` must be a valid pointer.
 */
enum HicommStatus hicomm_algebra_corpus(const char *name, struct HicommAlgebra **out);

/**
 * Universe size, or -1 for a null handle.
 *
 * # Safety
 * `alg` must be null or a live algebra handle.
 */
int hicomm_algebra_size(const struct HicommAlgebra *alg);

/**
 * Release an algebra handle (null is a no-op).
 *
 * # Safety
 * `alg` must be null or a handle this library returned, freed once.
 */
void hicomm_algebra_free(struct HicommAlgebra *alg);

/**
 * Number of congruences of the algebra.
 *
 * # Safety
 * `alg` must be a live algebra handle; `out` must be a valid pointer.
 */
enum HicommStatus hicomm_congruence_count(const struct HicommAlgebra *alg, uintptr_t *out);

/**
 * Fetch one congruence by index (0-based, ordered as enumerated).
 *
 * # Safety
 * `alg` must be a live algebra handle; `out` must be a valid pointer.
 */
enum HicommStatus hicomm_congruence_get(const struct HicommAlgebra *alg,
                                        uintptr_t index,
                                        struct HicommPartition **out);

/**
 * Parse a partition literal such as `0 2|1 3` over a universe of `size`
 * elements.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum HicommStatus hicomm_partition_parse(const char *text,
                                         uintptr_t size,
                                         struct HicommPartition **out);

/**
 * Write the partition's class literal (`0 2|1 3` style) into `buf` as a
 * NUL-terminated string. `*needed` always receives the required size
 * including the terminator; BufferTooSmall is returned when `cap` is short.
 *
 * # Safety
 * `p` must be a live partition handle; `buf` must point to `cap` writable
 * bytes; `needed` must be a valid pointer.
 */
enum HicommStatus hicomm_partition_format(const struct HicommPartition *p,
                                          char *buf,
                                          uintptr_t cap,
                                          uintptr_t *needed);

/**
 * 1 if the partitions are equal, 0 if not, -1 on a null handle.
 *
 * # Safety
 * Both arguments must be null or live partition handles.
 */
int hicomm_partition_equals(const struct HicommPartition *a, const struct HicommPartition *b);

/**
 * 1 if every class of `a` lies inside a class of `b` (refinement order),
 * 0 if not, -1 on a null handle.
 *
 * # Safety
 * Both arguments must be null or live partition handles.
 */
int hicomm_partition_leq(const struct HicommPartition *a, const struct HicommPartition *b);

/**
 * Release a partition handle (null is a no-op).
 *
 * # Safety
 * `p` must be null or a handle this library returned, freed once.
 */
void hicomm_partition_free(struct HicommPartition *p);

/**
 * Term-condition commutator of `count` congruences in the given direction.
 * `max_cubes` and `time_limit_ms` of 0 mean the defaults (16M cubes, no
 * deadline).
 *
 * # Safety
 * `alg` must be a live algebra handle, `thetas` an array of `count` live
 * partition handles, `out` a valid pointer.
 */
enum HicommStatus hicomm_tc_commutator(const struct HicommAlgebra *alg,
                                       const struct HicommPartition *const *thetas,
                                       uintptr_t count,
                                       uintptr_t direction,
                                       uint64_t max_cubes,
                                       uint64_t time_limit_ms,
                                       struct HicommPartition **out);

/**
 * Relational commutator of `count` congruences in the given direction.
 * Limits as in hicomm_tc_commutator.
 *
 * # Safety
 * As for hicomm_tc_commutator.
 */
enum HicommStatus hicomm_hyper_commutator(const struct HicommAlgebra *alg,
                                          const struct HicommPartition *const *thetas,
                                          uintptr_t count,
                                          uintptr_t direction,
                                          uint64_t max_cubes,
                                          uint64_t time_limit_ms,
                                          struct HicommPartition **out);

/**
 * Number of cubes in the directional-transitive closure of the matrix
 * tolerance of `count` congruences. Limits as in hicomm_tc_commutator.
 *
 * # Safety
 * As for hicomm_tc_commutator, with `out` receiving the count.
 */
enum HicommStatus hicomm_delta_size(const struct HicommAlgebra *alg,
                                    const struct HicommPartition *const *thetas,
                                    uintptr_t count,
                                    uint64_t max_cubes,
                                    uint64_t time_limit_ms,
                                    uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HICOMM_H */
