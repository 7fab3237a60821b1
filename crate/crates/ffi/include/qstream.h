#ifndef QSTREAM_H
#define QSTREAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum QsStatus {
  QS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QS_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not UTF-8.
   */
  QS_STATUS_UTF8 = 2,
  /**
   * Malformed JSON or a value that fails validation.
   */
  QS_STATUS_INVALID_INPUT = 3,
  /**
   * The input is not realizable by the class.
   */
  QS_STATUS_NOT_REALIZABLE = 4,
  /**
   * A query placement or strategy exceeds the budget.
   */
  QS_STATUS_BUDGET_EXCEEDED = 5,
  /**
   * The class has too small a Littlestone dimension for the request.
   */
  QS_STATUS_CLASS_TOO_SHALLOW = 6,
  /**
   * A bug inside the library; the message carries the panic text.
   */
  QS_STATUS_INTERNAL = 7,
} QsStatus;

/**
 * A validated concept class.
 */
typedef struct QsConceptClass QsConceptClass;

/**
 * A validated finite-horizon pattern class.
 */
typedef struct QsPatternClass QsPatternClass;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call into the library.
 */
const char *qs_last_error(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void qs_string_free(char *s);

/**
 * Parses and validates a concept class.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum QsStatus qs_concept_class_from_json(const char *json, struct QsConceptClass **out);

/**
 * # Safety
 * `h` must come from [`qs_concept_class_from_json`] and not have been freed.
 */
void qs_concept_class_free(struct QsConceptClass *h);

/**
 * Parses and validates a pattern class.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum QsStatus qs_pattern_class_from_json(const char *json, struct QsPatternClass **out);

/**
 * # Safety
 * `p` must come from [`qs_pattern_class_from_json`] and not have been freed.
 */
void qs_pattern_class_free(struct QsPatternClass *p);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_littlestone_dimension(const struct QsConceptClass *h, uint32_t *out);

/**
 * Blind learning dimension. `witness`, when non-null, receives the optimal
 * prediction vector as a string of `0`/`1`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_blind_learning_dimension(const struct QsPatternClass *p,
                                          uint32_t *out,
                                          char **witness);

/**
 * Query learning distance with budget `q`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_qld(const struct QsPatternClass *p, uint32_t q, uint32_t *out);

/**
 * Minimax value of the blind prediction game with budget `q`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_game_value(const struct QsPatternClass *p, uint32_t q, uint32_t *out);

/**
 * Worst-case mistakes of the BP-SOA strategy over every pattern in `p`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_bp_soa_worst_case(const struct QsPatternClass *p, uint32_t q, uint32_t *out);

/**
 * Exact expected blind error of a query placement against the two-point
 * stream with `units` unit intervals and budget slope `slope_num/slope_den`.
 * `exact` receives the value as `"p/q"` (or an integer), `approx` its
 * nearest double.
 *
 * # Safety
 * `times` must point to `n_times` doubles (it may be null when `n_times`
 * is 0); `exact` and `approx` must be writable.
 */
enum QsStatus qs_exact_blind_error(uint64_t units,
                                   uint64_t slope_num,
                                   uint64_t slope_den,
                                   const double *times,
                                   size_t n_times,
                                   char **exact,
                                   double *approx);

/**
 * One seeded run of the uniform sampler with SOA. `report` receives the
 * run report as JSON.
 *
 * # Safety
 * `h` must be a live handle; `stream_json` a nul-terminated string;
 * `report` must be writable.
 */
enum QsStatus qs_run_uniform_sampler(const struct QsConceptClass *h,
                                     const char *stream_json,
                                     double delta,
                                     uint64_t seed,
                                     char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSTREAM_H */
