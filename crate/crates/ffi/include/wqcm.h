#ifndef WQCM_H
#define WQCM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum WqcmStatus {
  WQCM_STATUS_OK = 0,
  /**
   * The report was produced and at least one asserted check failed.
   */
  WQCM_STATUS_CHECK_FAILED = 1,
  WQCM_STATUS_INVALID_INPUT = 2,
  WQCM_STATUS_NULL_POINTER = 3,
  WQCM_STATUS_INVALID_UTF8 = 4,
  WQCM_STATUS_EVAL_ERROR = 5,
  WQCM_STATUS_PANIC = 6,
} WqcmStatus;

/**
 * Opaque structure handle.
 */
typedef struct WqcmStructure WqcmStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a structure document (JSON text).
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum WqcmStatus wqcm_structure_from_json(const char *json, struct WqcmStructure **out);

/**
 * Build a catalog structure from a key such as `sasakian-r3` or
 * `builtin:scaled?s=2`.
 *
 * # Safety
 * `key` must be a nul-terminated string and `out` a valid pointer.
 */
enum WqcmStatus wqcm_structure_from_builtin(const char *key, struct WqcmStructure **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `s` must come from a constructor above and not be used afterwards.
 */
void wqcm_structure_free(struct WqcmStructure *s);

/**
 * Chart dimension `2n + 1`.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum WqcmStatus wqcm_structure_dim(const struct WqcmStructure *s, size_t *out);

/**
 * Run a suite (`validate`, `identity`, `curvature`, `theorems` or `all`)
 * with default tolerances and write the JSON report, without timestamp, to
 * `report_json`. Returns `Ok` or `CheckFailed` when a report was produced.
 *
 * # Safety
 * `s` must be a live handle, `suite` a nul-terminated string and
 * `report_json` a valid pointer.
 */
enum WqcmStatus wqcm_run_check(const struct WqcmStructure *s,
                               const char *suite,
                               uint32_t points,
                               uint64_t seed,
                               char **report_json);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void wqcm_string_free(char *p);

/**
 * Message for the last error on this thread, or null. Valid until the next
 * call into the library on the same thread.
 */
const char *wqcm_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WQCM_H */
