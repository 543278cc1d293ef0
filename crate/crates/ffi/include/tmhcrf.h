/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef TMHCRF_H
#define TMHCRF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TmhStatus {
  TMH_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TMH_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  TMH_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad configuration or arguments.
   */
  TMH_STATUS_USAGE = 3,
  /**
   * Bad input data or model file.
   */
  TMH_STATUS_DATA = 4,
  /**
   * Numerical failure during training or inference.
   */
  TMH_STATUS_NUMERICAL = 5,
  /**
   * Internal panic; the library state is unchanged.
   */
  TMH_STATUS_PANIC = 6,
} TmhStatus;

/**
 * Opaque trained model.
 */
typedef struct TmhModel TmhModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Trains a model on a labelled dataset.
 *
 * `config` uses the experiment configuration format and may be null for
 * the defaults. On success `*out` receives a new handle.
 *
 * # Safety
 * String arguments are null or NUL-terminated; `out` is writable.
 */
enum TmhStatus tmh_train(const char *dataset, const char *config, struct TmhModel **out);

/**
 * # Safety
 * `path` is null or NUL-terminated; `out` is writable.
 */
enum TmhStatus tmh_model_load(const char *path, struct TmhModel **out);

/**
 * Parses a model from its text form.
 *
 * # Safety
 * `model_text` is null or NUL-terminated; `out` is writable.
 */
enum TmhStatus tmh_model_from_string(const char *model_text, struct TmhModel **out);

/**
 * # Safety
 * `model` is a live handle or null; `path` is null or NUL-terminated.
 */
enum TmhStatus tmh_model_save(const struct TmhModel *model, const char *path);

/**
 * Text form of a model; free with [`tmh_string_free`].
 *
 * # Safety
 * `model` is a live handle or null; `out` is writable.
 */
enum TmhStatus tmh_model_to_string(const struct TmhModel *model, char **out);

/**
 * # Safety
 * `model` is a live handle or null; `out` is writable.
 */
enum TmhStatus tmh_model_num_features(const struct TmhModel *model, uintptr_t *out);

/**
 * Labels one sequence; `*out` receives a `0`/`1` string of the same length,
 * to be freed with [`tmh_string_free`].
 *
 * # Safety
 * `model` is a live handle or null; `sequence` is null or NUL-terminated;
 * `out` is writable.
 */
enum TmhStatus tmh_predict(const struct TmhModel *model, const char *sequence, char **out);

/**
 * # Safety
 * `model` is null or a handle not yet freed.
 */
void tmh_model_free(struct TmhModel *model);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void tmh_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library on this thread.
 */
const char *tmh_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TMHCRF_H */
