#ifndef MCKELM_H
#define MCKELM_H

/* Generated by cbindgen from the mckelm-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Anything other than `Ok` leaves a
 * message readable through [`mck_last_error`] on the calling thread.
 */
typedef enum MckStatus {
  /**
   * The call succeeded.
   */
  MCK_STATUS_OK = 0,
  /**
   * An argument failed validation: bad shape, range, code, or file
   * content.
   */
  MCK_STATUS_INVALID = 1,
  /**
   * The underlying file operation failed.
   */
  MCK_STATUS_IO = 2,
  /**
   * A numerical routine could not complete (e.g. an indefinite
   * system).
   */
  MCK_STATUS_NUMERICAL = 3,
  /**
   * A required pointer argument was null.
   */
  MCK_STATUS_NULL_POINTER = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  MCK_STATUS_BAD_UTF8 = 5,
  /**
   * An internal panic was caught at the boundary; the handle state
   * is unchanged but the operation did not happen.
   */
  MCK_STATUS_PANIC = 6,
} MckStatus;

/**
 * Opaque handle to a trained model bundle.
 */
typedef struct MckModel MckModel;

/**
 * Training request passed to [`mck_train`]. Obtain a filled-in value
 * from [`mck_train_options_default`] and override what you need.
 */
typedef struct MckTrainOptions {
  /**
   * Classifier to fit: 0 multicolumn kernel machine, 1 single
   * kernel machine, 2 random-feature machine, 3 reduced kernel
   * machine, 4 nearest neighbour, 5 Gaussian naive Bayes.
   */
  uint32_t classifier;
  /**
   * Kernel for the kernel-based classifiers: 0 Gaussian RBF,
   * 1 chi-square.
   */
  uint32_t kernel;
  /**
   * Kernel scale: gamma for RBF, sigma for chi-square.
   */
  double kernel_scale;
  /**
   * Ridge regularization weight; must be positive.
   */
  double regularization;
  /**
   * Partition depth for the multicolumn machine: 2^eta subsets.
   */
  uint32_t eta;
  /**
   * Training rows consulted when routing a query to columns.
   */
  uint64_t route_k;
  /**
   * Hidden nodes for the random-feature machine; 0 scales the
   * count with the training rows.
   */
  uint64_t hidden;
  /**
   * Neighbours for the nearest-neighbour classifier.
   */
  uint64_t knn_k;
  /**
   * Seed for the randomized trainers.
   */
  uint64_t seed;
} MckTrainOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mck_version(void);

/**
 * Message for the most recent failure on the calling thread, or an
 * empty string when nothing failed yet. The pointer stays valid until
 * the next failing call on the same thread.
 */
const char *mck_last_error(void);

/**
 * The defaults every training run starts from: the multicolumn
 * machine at depth 3 with a unit-scale RBF kernel.
 */
struct MckTrainOptions mck_train_options_default(void);

/**
 * Train a classifier on a labelled dataset file (`.csv` or the binary
 * dataset format, decided by content) and hand back an owned model.
 *
 * `csv_has_header` is consulted only for CSV input. On success
 * `*out_model` receives the handle.
 *
 * # Safety
 * `train_path` must be null or NUL-terminated; `options` and
 * `out_model` must be null or valid for reads/writes respectively.
 */
enum MckStatus mck_train(const char *train_path,
                         bool csv_has_header,
                         const struct MckTrainOptions *options,
                         struct MckModel **out_model);

/**
 * Load a model file. On success `*out_model` receives the handle.
 *
 * # Safety
 * `path` must be null or NUL-terminated; `out_model` must be null or
 * valid for a write.
 */
enum MckStatus mck_model_load(const char *path, struct MckModel **out_model);

/**
 * Write the model to a file, atomically replacing any existing one.
 *
 * # Safety
 * `model` must be null or a live handle from this library; `path`
 * must be null or NUL-terminated.
 */
enum MckStatus mck_model_save(const struct MckModel *model, const char *path);

/**
 * Release a model handle. Null is a no-op.
 *
 * # Safety
 * `model` must be null or a handle from this library not yet freed.
 */
void mck_model_free(struct MckModel *model);

/**
 * Width of the feature rows the model accepts (before any stored
 * feature selection is applied). Returns 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle from this library.
 */
uint64_t mck_model_feature_count(const struct MckModel *model);

/**
 * Number of classes the model distinguishes. Returns 0 for a null
 * handle.
 *
 * # Safety
 * `model` must be null or a live handle from this library.
 */
uint64_t mck_model_class_count(const struct MckModel *model);

/**
 * Static name of the classifier kind inside the handle ("mckelm",
 * "kelm", "elm", "rkelm", "knn", or "gnb"). Returns an empty string
 * for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle from this library.
 */
const char *mck_model_kind(const struct MckModel *model);

/**
 * Classify `rows` feature rows stored row-major in `features`
 * (`rows * columns` doubles; `columns` must match
 * [`mck_model_feature_count`]). Writes one label per row into
 * `out_labels`, in the label values of the original training file.
 *
 * Feature values are held at single precision internally, matching
 * the on-disk dataset formats. With `score_average` false the
 * multicolumn machine combines its columns by majority vote;
 * with true it averages their raw scores. Other classifiers ignore
 * the flag.
 *
 * # Safety
 * `model` must be null or a live handle; `features` must be null or
 * `rows * columns` readable doubles; `out_labels` must be null or
 * `rows` writable 64-bit integers.
 */
enum MckStatus mck_predict(const struct MckModel *model,
                           const double *features,
                           uint64_t rows,
                           uint64_t columns,
                           bool score_average,
                           int64_t *out_labels);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCKELM_H */
