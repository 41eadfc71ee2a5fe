#ifndef ADFF_H
#define ADFF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AdffStatus {
  ADFF_STATUS_OK = 0,
  ADFF_STATUS_NULL_POINTER = 1,
  ADFF_STATUS_INVALID_ARGUMENT = 2,
  ADFF_STATUS_IO = 3,
  ADFF_STATUS_DECODE = 4,
  ADFF_STATUS_SHAPE = 5,
  ADFF_STATUS_CHECKPOINT = 6,
  ADFF_STATUS_BUFFER_TOO_SMALL = 7,
  ADFF_STATUS_INTERNAL = 8,
} AdffStatus;

typedef enum AdffTask {
  ADFF_TASK_VALENCE = 0,
  ADFF_TASK_AROUSAL = 1,
  ADFF_TASK_MULTI = 2,
  ADFF_TASK_TWO_V = 3,
  ADFF_TASK_TWO_A = 4,
  ADFF_TASK_FOUR = 5,
} AdffTask;

/**
 * Opaque log-Mel spectrogram.
 */
typedef struct AdffMel AdffMel;

/**
 * Opaque model handle.
 */
typedef struct AdffModel AdffModel;

/**
 * Settings for [`adff_model_new`]; unspecified architecture settings take
 * their defaults.
 */
typedef struct AdffModelParams {
  uint32_t seg_num;
  double width;
  uint32_t lstm_hidden;
  enum AdffTask task;
  uint64_t seed;
} AdffModelParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *adff_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *adff_version(void);

/**
 * Decodes a WAV file and computes its log-Mel spectrogram.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AdffStatus adff_mel_from_file(const char *path, struct AdffMel **out);

/**
 * Computes the log-Mel spectrogram of mono samples, resampling to 44.1 kHz
 * when needed.
 *
 * # Safety
 * `samples` must point to `len` floats and `out` must be valid.
 */
enum AdffStatus adff_mel_from_samples(const float *samples,
                                      size_t len,
                                      uint32_t sample_rate,
                                      struct AdffMel **out);

/**
 * Number of frames, or 0 for a null handle.
 *
 * # Safety
 * `mel` must be null or a live handle.
 */
size_t adff_mel_frames(const struct AdffMel *mel);

/**
 * Mel bands per frame (always 128).
 */
size_t adff_mel_bands(void);

/**
 * Time-major `frames × 128` values, valid while the handle lives.
 *
 * # Safety
 * `mel` must be null or a live handle.
 */
const float *adff_mel_data(const struct AdffMel *mel);

/**
 * # Safety
 * `mel` must be null or a handle not yet freed.
 */
void adff_mel_free(struct AdffMel *mel);

/**
 * Creates a freshly initialised model.
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum AdffStatus adff_model_new(const struct AdffModelParams *params, struct AdffModel **out);

/**
 * Creates a model from a JSON model configuration with every field given.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid.
 */
enum AdffStatus adff_model_new_json(const char *json, uint64_t seed, struct AdffModel **out);

/**
 * Loads a checkpoint.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid.
 */
enum AdffStatus adff_model_load(const char *path, struct AdffModel **out);

/**
 * Writes a checkpoint.
 *
 * # Safety
 * `model` must be a live handle and `path` a NUL-terminated string.
 */
enum AdffStatus adff_model_save(const struct AdffModel *model, const char *path);

/**
 * Outputs per example: 1 for single-target regression, 2 for joint
 * regression or binary classes, 4 for quadrants. 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t adff_model_arity(const struct AdffModel *model);

/**
 * Input channels the model expects. 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t adff_model_seg_num(const struct AdffModel *model);

/**
 * Eval-mode forward pass on a `(batch, seg_num, frames, 128)` input. Writes
 * `batch × arity` values to `out`.
 *
 * # Safety
 * `input` must hold `batch·seg_num·frames·128` floats and `out` at least
 * `out_len`.
 */
enum AdffStatus adff_model_forward(struct AdffModel *model,
                                   const float *input,
                                   size_t batch,
                                   size_t frames,
                                   float *out,
                                   size_t out_len);

/**
 * Stacks a spectrogram into the model's channels and predicts one example.
 *
 * # Safety
 * `model` and `mel` must be live handles; `out` must hold `out_len` floats.
 */
enum AdffStatus adff_model_predict_mel(struct AdffModel *model,
                                       const struct AdffMel *mel,
                                       float *out,
                                       size_t out_len);

/**
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void adff_model_free(struct AdffModel *model);

/**
 * Writes a synthetic annotated corpus of `n` clips under `root`.
 *
 * # Safety
 * `root` must be a NUL-terminated string.
 */
enum AdffStatus adff_synth_generate(const char *root, size_t n, uint64_t seed, double duration_s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADFF_H */
