#ifndef FREEGAD_H
#define FREEGAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FreegadSimilarity {
  FREEGAD_SIMILARITY_SQUARED_NORM = 0,
  FREEGAD_SIMILARITY_COSINE = 1,
} FreegadSimilarity;

typedef enum FreegadStatistic {
  FREEGAD_STATISTIC_SUM = 0,
  FREEGAD_STATISTIC_MIN = 1,
  FREEGAD_STATISTIC_MAX = 2,
  FREEGAD_STATISTIC_AVG = 3,
} FreegadStatistic;

typedef enum FreegadStatus {
  FREEGAD_STATUS_OK = 0,
  FREEGAD_STATUS_NULL_POINTER = 1,
  FREEGAD_STATUS_INVALID_ARGUMENT = 2,
  FREEGAD_STATUS_IO = 3,
  FREEGAD_STATUS_PARSE = 4,
  FREEGAD_STATUS_SHAPE_MISMATCH = 5,
  FREEGAD_STATUS_INDEX_OUT_OF_RANGE = 6,
  FREEGAD_STATUS_K_TOO_LARGE = 7,
  FREEGAD_STATUS_DEGENERATE_LABELS = 8,
  FREEGAD_STATUS_INVALID_CONFIG = 9,
  FREEGAD_STATUS_PANIC = 10,
} FreegadStatus;

/**
 * Opaque loaded or generated dataset.
 */
typedef struct FreegadDataset FreegadDataset;

/**
 * Opaque result of one pipeline run.
 */
typedef struct FreegadScores FreegadScores;

/**
 * Pipeline hyperparameters.
 */
typedef struct FreegadConfig {
  uint32_t layers;
  uint32_t k;
  double alpha;
  double beta;
  double sigma;
  enum FreegadSimilarity similarity;
  enum FreegadStatistic statistic;
} FreegadConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL.
 *
 * The pointer stays valid until the next `freegad_*` call on this thread.
 */
const char *freegad_last_error_message(void);

/**
 * Defaults: L = 2, K = 10, alpha = beta = 1, sigma = 1e-8, squared-norm similarity, sum statistic.
 */
struct FreegadConfig freegad_config_default(void);

/**
 * Loads a dataset directory.
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out` a valid pointer to write to.
 */
enum FreegadStatus freegad_dataset_load(const char *dir, struct FreegadDataset **out);

/**
 * Builds a dataset from row-major features and an edge list of `2 * num_edges`
 * node indices. `labels` may be NULL.
 *
 * # Safety
 * `features` must hold `n * m` doubles, `edges` `2 * num_edges` values (or be
 * NULL when `num_edges` is 0) and `labels`, when non-NULL, `n` bytes.
 */
enum FreegadStatus freegad_dataset_from_arrays(size_t n,
                                               size_t m,
                                               const double *features,
                                               const uint64_t *edges,
                                               size_t num_edges,
                                               const uint8_t *labels,
                                               struct FreegadDataset **out);

/**
 * Generates a seeded synthetic dataset with injected anomalies.
 *
 * # Safety
 * `out` must be a valid pointer to write to.
 */
enum FreegadStatus freegad_dataset_generate(size_t n,
                                            size_t m,
                                            uint64_t seed,
                                            size_t n_struct,
                                            size_t n_ctx,
                                            size_t clique_size,
                                            struct FreegadDataset **out);

/**
 * Writes a dataset directory in the on-disk format.
 *
 * # Safety
 * `dataset` must come from a `freegad_dataset_*` constructor; `dir` must be NUL-terminated.
 */
enum FreegadStatus freegad_dataset_save(const struct FreegadDataset *dataset, const char *dir);

/**
 * # Safety
 * `dataset` must be NULL or a live handle.
 */
size_t freegad_dataset_num_nodes(const struct FreegadDataset *dataset);

/**
 * # Safety
 * `dataset` must be NULL or a live handle.
 */
size_t freegad_dataset_num_features(const struct FreegadDataset *dataset);

/**
 * # Safety
 * `dataset` must be NULL or a live handle.
 */
size_t freegad_dataset_num_edges(const struct FreegadDataset *dataset);

/**
 * Copies the labels into `out` (length `n`). Fails when the dataset has none.
 *
 * # Safety
 * `dataset` must be a live handle and `out` hold `len` bytes.
 */
enum FreegadStatus freegad_dataset_labels(const struct FreegadDataset *dataset,
                                          uint8_t *out,
                                          size_t len);

/**
 * # Safety
 * `dataset` must be NULL or a handle not yet freed.
 */
void freegad_dataset_free(struct FreegadDataset *dataset);

/**
 * Runs the full pipeline. `config` may be NULL for defaults.
 *
 * # Safety
 * `dataset` must be a live handle, `config` NULL or valid, `out` writable.
 */
enum FreegadStatus freegad_score(const struct FreegadDataset *dataset,
                                 const struct FreegadConfig *config,
                                 struct FreegadScores **out);

/**
 * # Safety
 * `scores` must be NULL or a live handle.
 */
size_t freegad_scores_len(const struct FreegadScores *scores);

/**
 * Copies final, positive-anchor and negative-anchor scores. Any output
 * pointer may be NULL to skip it; non-NULL ones must hold `len` doubles.
 *
 * # Safety
 * See above; `scores` must be a live handle.
 */
enum FreegadStatus freegad_scores_copy(const struct FreegadScores *scores,
                                       double *final_out,
                                       double *positive_out,
                                       double *negative_out,
                                       size_t len);

/**
 * Anchors per side.
 *
 * # Safety
 * `scores` must be NULL or a live handle.
 */
size_t freegad_scores_num_anchors(const struct FreegadScores *scores);

/**
 * Copies the ascending positive and negative anchor indices (`k` each).
 *
 * # Safety
 * `scores` must be a live handle; both outputs must hold `k` values.
 */
enum FreegadStatus freegad_scores_anchors(const struct FreegadScores *scores,
                                          uint64_t *positive_out,
                                          uint64_t *negative_out,
                                          size_t k);

/**
 * Writes a score file; labels are taken from `dataset` when it is non-NULL and labeled.
 *
 * # Safety
 * `scores` must be live, `dataset` NULL or live, `path` NUL-terminated.
 */
enum FreegadStatus freegad_scores_save(const struct FreegadScores *scores,
                                       const struct FreegadDataset *dataset,
                                       const char *path);

/**
 * # Safety
 * `scores` must be NULL or a handle not yet freed.
 */
void freegad_scores_free(struct FreegadScores *scores);

/**
 * AUROC and AUPRC (fractions in [0, 1]) of `n` scores against 0/1 labels.
 *
 * # Safety
 * `scores` and `labels` must hold `n` values; outputs must be writable.
 */
enum FreegadStatus freegad_evaluate(const double *scores,
                                    const uint8_t *labels,
                                    size_t n,
                                    double *auroc_out,
                                    double *auprc_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREEGAD_H */
