#ifndef FMU_H
#define FMU_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum FmuStatus {
  FMU_STATUS_OK = 0,
  FMU_STATUS_NULL_ARGUMENT = 1,
  FMU_STATUS_INVALID_UTF8 = 2,
  FMU_STATUS_PARSE_ERROR = 3,
  FMU_STATUS_TYPE_ERROR = 4,
  /**
   * The chain did not close within the node budget.
   */
  FMU_STATUS_INCOMPLETE = 5,
  FMU_STATUS_INTERNAL = 6,
} FmuStatus;

/**
 * Outcome of an approximation test.
 */
typedef enum FmuVerdict {
  FMU_VERDICT_HOLDS = 0,
  FMU_VERDICT_DISTINGUISHED = 1,
  FMU_VERDICT_INCONCLUSIVE = 2,
} FmuVerdict;

/**
 * A parsed, closed program.
 */
typedef struct FmuProgram FmuProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call on the same thread.
 */
const char *fmu_last_error(void);

/**
 * Parses a closed program from concrete syntax.
 *
 * # Safety
 * `src` must be a nul-terminated string and `out` a valid pointer.
 */
enum FmuStatus fmu_program_parse(const char *src, struct FmuProgram **out);

/**
 * Releases a program. Null is ignored.
 *
 * # Safety
 * `p` must come from [`fmu_program_parse`] and not be used afterwards.
 */
void fmu_program_free(struct FmuProgram *p);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void fmu_string_free(char *s);

/**
 * Typechecks a program, against `expected` when it is not null, and
 * stores the printed type in `type_out`.
 *
 * # Safety
 * Pointers must be valid; `expected` may be null.
 */
enum FmuStatus fmu_program_check(const struct FmuProgram *p, const char *expected, char **type_out);

/**
 * Bounds on the termination probability as `"num/den"` strings. `exact`
 * is set to 1 when both bounds coincide because the chain closed.
 * `nodes == 0` selects the default budget.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmuStatus fmu_prob_bounds(const struct FmuProgram *p,
                               size_t nodes,
                               char **lower,
                               char **upper,
                               int *exact);

/**
 * Exact termination probability; `Incomplete` if the chain does not close.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmuStatus fmu_prob_exact(const struct FmuProgram *p, size_t nodes, char **out);

/**
 * Tests whether `lhs` approximates `rhs` at `ty`. When the verdict is not
 * `Holds`, `witness` receives the context in concrete syntax and `left`,
 * `right` the bounds that decided it (lower on the left, upper on the
 * right); otherwise they are set to null. `depth == 0` and `nodes == 0`
 * select defaults.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmuStatus fmu_ciu_approx(const struct FmuProgram *lhs,
                              const struct FmuProgram *rhs,
                              const char *ty,
                              size_t depth,
                              size_t nodes,
                              enum FmuVerdict *verdict,
                              char **witness,
                              char **left,
                              char **right);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FMU_H */
