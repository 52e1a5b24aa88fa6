#ifndef TORICK_H
#define TORICK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes. The numeric values match the exit codes of the `torick` tool.
 */
typedef enum TorickStatus {
  TORICK_STATUS_OK = 0,
  /**
   * Null pointer, invalid UTF-8 or an out-of-range argument.
   */
  TORICK_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed or unreadable input.
   */
  TORICK_STATUS_SCHEMA = 2,
  /**
   * A mathematical precondition failed.
   */
  TORICK_STATUS_PRECONDITION = 3,
  /**
   * The report was produced but an internal cross-check disagreed.
   */
  TORICK_STATUS_MISMATCH = 4,
  TORICK_STATUS_INTERNAL = 5,
} TorickStatus;

/**
 * Opaque rational polyhedral cone.
 */
typedef struct TorickCone TorickCone;

/**
 * Opaque fibered model.
 */
typedef struct TorickModel TorickModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *torick_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *torick_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void torick_string_free(char *s);

/**
 * Loads a model file; fan references resolve relative to the file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TorickStatus torick_model_load(const char *path, struct TorickModel **out);

/**
 * Parses a model from JSON text. `base_dir` may be null.
 *
 * # Safety
 * `json` and a non-null `base_dir` must be NUL-terminated strings; `out` must be valid.
 */
enum TorickStatus torick_model_parse(const char *json,
                                     const char *base_dir,
                                     struct TorickModel **out);

/**
 * # Safety
 * `m` must be null or a handle from this library, not yet freed.
 */
void torick_model_free(struct TorickModel *m);

/**
 * Dimension of the total space, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
uint32_t torick_model_dim(const struct TorickModel *m);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TorickStatus torick_cone_load(const char *path, struct TorickCone **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TorickStatus torick_cone_parse(const char *json, struct TorickCone **out);

/**
 * # Safety
 * `c` must be null or a handle from this library, not yet freed.
 */
void torick_cone_free(struct TorickCone *c);

/**
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum TorickStatus torick_volume(const struct TorickModel *m, char **out);

/**
 * With `derivative_check`, also recomputes DF as a derivative and returns
 * `TORICK_STATUS_MISMATCH` (with the report) on disagreement.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum TorickStatus torick_df(const struct TorickModel *m, bool derivative_check, char **out);

/**
 * DF along `L + tE`. `direction` is `zero`, `canonical`, `ray:<i>` or a
 * comma-separated coefficient list. `out_csv` may be null.
 *
 * # Safety
 * `m` must be a live handle, `direction` a NUL-terminated string, `out` valid.
 */
enum TorickStatus torick_path(const struct TorickModel *m,
                              const char *direction,
                              size_t samples,
                              char **out,
                              char **out_csv);

/**
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum TorickStatus torick_multiplicities(const struct TorickModel *m, char **out);

/**
 * Returns `TORICK_STATUS_MISMATCH` (with the report) if any refinement changes V or DF.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum TorickStatus torick_pullback_check(const struct TorickModel *m,
                                        size_t trials,
                                        uint64_t seed,
                                        char **out);

/**
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum TorickStatus torick_classify(const struct TorickCone *c, char **out);

/**
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum TorickStatus torick_search(const struct TorickCone *c, uint32_t bound, char **out);

/**
 * Seed used by `torick pullback-check` when none is given.
 */
uint64_t torick_default_seed(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORICK_H */
