#ifndef HSAP_H
#define HSAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define HSAP_MODE_LINEAR 0

#define HSAP_MODE_SECANTS 1

#define HSAP_ANCHORS_RANDOM 0

#define HSAP_ANCHORS_EXTREMAL 1

#define HSAP_METRIC_EUCLIDEAN 0

#define HSAP_METRIC_COSINE 1

#define HSAP_INIT_PCA 0

#define HSAP_INIT_RANDOM 1

typedef enum HsapStatus {
  HSAP_STATUS_OK = 0,
  /**
   * Bad argument or parameter value.
   */
  HSAP_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Unreadable or malformed data.
   */
  HSAP_STATUS_DATA_ERROR = 2,
  /**
   * Numerical failure inside the algorithm.
   */
  HSAP_STATUS_NUMERICAL_ERROR = 3,
  /**
   * A required pointer was null.
   */
  HSAP_STATUS_NULL_POINTER = 4,
  /**
   * Internal panic; the library state is unaffected.
   */
  HSAP_STATUS_PANIC = 5,
} HsapStatus;

/**
 * Opaque dense matrix.
 */
typedef struct HsapMatrix HsapMatrix;

/**
 * Opaque result of a projection run.
 */
typedef struct HsapRun HsapRun;

/**
 * Run parameters. Fill with `hsap_options_default` and override fields.
 */
typedef struct HsapOptions {
  /**
   * Target dimension.
   */
  size_t k;
  /**
   * k-means clusters; ignored when labels are passed.
   */
  size_t clusters;
  /**
   * `HSAP_MODE_*`.
   */
  uint32_t mode;
  double alpha;
  size_t max_iters;
  size_t anchors;
  /**
   * `HSAP_ANCHORS_*`.
   */
  uint32_t anchor_strategy;
  /**
   * Cluster basis energy fraction, used when `basis_dim` is 0.
   */
  double energy;
  size_t basis_dim;
  size_t within_samples;
  /**
   * `HSAP_METRIC_*`.
   */
  uint32_t metric;
  size_t kmeans_iters;
  uint64_t seed;
  /**
   * `HSAP_INIT_*`.
   */
  uint32_t init;
  /**
   * 0 disables early stopping.
   */
  size_t stop_window;
  double stop_tol;
} HsapOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hsap_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hsap_version(void);

/**
 * Writes the default options to `out`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum HsapStatus hsap_options_default(struct HsapOptions *out);

/**
 * Copies a row-major `rows x cols` buffer into a new matrix.
 *
 * # Safety
 * `data` must point to `rows * cols` readable doubles; `out` must be valid
 * for writes.
 */
enum HsapStatus hsap_matrix_new(size_t rows,
                                size_t cols,
                                const double *data,
                                struct HsapMatrix **out);

/**
 * Loads a CSV or binary matrix file (format detected from its first bytes).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum HsapStatus hsap_matrix_load(const char *path, struct HsapMatrix **out);

/**
 * Row count, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t hsap_matrix_rows(const struct HsapMatrix *m);

/**
 * Column count, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t hsap_matrix_cols(const struct HsapMatrix *m);

/**
 * Copies the entries, row-major, into `out`, which must hold exactly
 * `rows * cols` doubles (`len`).
 *
 * # Safety
 * `m` must be a live handle and `out` valid for `len` writes.
 */
enum HsapStatus hsap_matrix_copy(const struct HsapMatrix *m, double *out, size_t len);

/**
 * Releases a matrix. Null is ignored.
 *
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void hsap_matrix_free(struct HsapMatrix *m);

/**
 * Generates the synthetic two-lines-and-a-plane set in R^3: `per_line`
 * points on each line followed by `plane` points on the plane.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum HsapStatus hsap_synthetic(size_t per_line,
                               size_t plane,
                               uint64_t seed,
                               struct HsapMatrix **out);

/**
 * Runs the hierarchical engine on the rows of `data`. With `labels`
 * non-null (`labels_len` = row count) the clusters come from the labels,
 * otherwise from k-means with `opts->clusters` clusters.
 *
 * # Safety
 * `data` and `opts` must be live; `labels` null or valid for `labels_len`
 * reads; `out` valid for writes.
 */
enum HsapStatus hsap_run(const struct HsapMatrix *data,
                         const int64_t *labels,
                         size_t labels_len,
                         const struct HsapOptions *opts,
                         struct HsapRun **out);

/**
 * Plain SAP on the full secant set of `data` from a PCA start.
 *
 * # Safety
 * `data` must be live; `out` valid for writes.
 */
enum HsapStatus hsap_sap_run(const struct HsapMatrix *data,
                             size_t k,
                             double alpha,
                             size_t iters,
                             uint64_t seed,
                             struct HsapRun **out);

/**
 * Copies the final `n x k` projection into a new matrix handle.
 *
 * # Safety
 * `run` must be live; `out` valid for writes.
 */
enum HsapStatus hsap_run_projection(const struct HsapRun *run, struct HsapMatrix **out);

/**
 * Objective at the final frame, or NaN for a null handle.
 *
 * # Safety
 * `run` must be null or live.
 */
double hsap_run_final_objective(const struct HsapRun *run);

/**
 * Number of iterations run (trace length), or 0 for a null handle.
 *
 * # Safety
 * `run` must be null or live.
 */
size_t hsap_run_iterations(const struct HsapRun *run);

/**
 * Copies the per-iteration objectives into `out` (`len` must equal the
 * iteration count).
 *
 * # Safety
 * `run` must be live and `out` valid for `len` writes.
 */
enum HsapStatus hsap_run_trace(const struct HsapRun *run, double *out, size_t len);

/**
 * Releases a run. Null is ignored.
 *
 * # Safety
 * `run` must be null or a handle not yet freed.
 */
void hsap_run_free(struct HsapRun *run);

/**
 * Principal angles, nondecreasing, between the column spans of two
 * orthonormal-column matrices. `len` must equal the smaller column count.
 *
 * # Safety
 * `a`, `b` must be live and `out` valid for `len` writes.
 */
enum HsapStatus hsap_principal_angles(const struct HsapMatrix *a,
                                      const struct HsapMatrix *b,
                                      double *out,
                                      size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HSAP_H */
