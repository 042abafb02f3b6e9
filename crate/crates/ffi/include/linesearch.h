#ifndef LINESEARCH_H
#define LINESEARCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_INVALID_PROBABILITY = 1,
  LS_STATUS_INVALID_SPEED = 2,
  LS_STATUS_UNSOLVABLE_INSTANCE = 3,
  LS_STATUS_DIVERGENT_FAST_RATIO = 4,
  LS_STATUS_RATIO_NOT_ABOVE_ONE = 5,
  LS_STATUS_INVALID_SCOUT_RATIO = 6,
  LS_STATUS_SLOW_SPEED_ZERO = 7,
  LS_STATUS_NEVER_PASSED = 8,
  LS_STATUS_DIVERGENT_SERIES = 9,
  LS_STATUS_NO_DETECTION = 10,
  LS_STATUS_TRUNCATION_LIMIT = 11,
  LS_STATUS_INVALID_TARGET = 12,
  LS_STATUS_INVALID_BETA = 13,
  LS_STATUS_INVALID_ARGUMENT = 14,
  LS_STATUS_NULL_POINTER = 15,
  LS_STATUS_PANIC = 16,
} LsStatus;

typedef enum LsAlgorithm {
  LS_ALGORITHM_FAST = 0,
  LS_ALGORITHM_SLOW = 1,
  LS_ALGORITHM_HYBRID = 2,
} LsAlgorithm;

typedef enum LsQuantity {
  LS_QUANTITY_CR_BEST = 0,
  LS_QUANTITY_CR_FAST = 1,
  LS_QUANTITY_CR_SLOW = 2,
  LS_QUANTITY_CR_HYBRID = 3,
  LS_QUANTITY_A_STAR = 4,
  LS_QUANTITY_B_STAR = 5,
  LS_QUANTITY_IMPROVEMENT = 6,
  LS_QUANTITY_REGION = 7,
} LsQuantity;

/**
 * Opaque heatmap handle.
 */
typedef struct LsHeatmap LsHeatmap;

/**
 * Opaque strategy handle.
 */
typedef struct LsStrategy LsStrategy;

typedef struct LsSupResult {
  double sup_cr;
  double argmax_d;
  size_t argmax_round;
} LsSupResult;

typedef struct LsMonteCarlo {
  double mean;
  double std_error;
  uint64_t trials;
} LsMonteCarlo;

typedef struct LsTunedHybrid {
  double a_star;
  double b_star;
  double cr_star;
  double cr1;
  double cr2;
  size_t iterations;
  bool converged;
  bool hit_a_bound;
} LsTunedHybrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ls_version(void);

/**
 * Short static description of a status code.
 */
const char *ls_status_message(enum LsStatus status);

/**
 * Detail of the last error on this thread. Valid until the next call into
 * the library from the same thread.
 */
const char *ls_last_error(void);

/**
 * Ratio of the fast strategy at its optimal expansion ratio.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_fast_cr(double p, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_slow_cr(double v, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_fast_ratio(double p, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_slow_ratio(double v, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_hybrid_cr(double a, double b, double p, double v, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_hybrid_cr1(double a, double b, double v, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_hybrid_cr2(double a, double b, double p, double v, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_lower_bound_cr(double v, double beta, double *out);

/**
 * Slow speed at which the fast and slow strategies tie.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_fast_slow_threshold(double p, double *out);

/**
 * Creates a strategy. `b` is ignored unless `algorithm` is hybrid.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_strategy_new(enum LsAlgorithm algorithm,
                              double p,
                              double v,
                              double a,
                              double b,
                              struct LsStrategy **out);

/**
 * Releases a strategy. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`ls_strategy_new`] and not be used afterwards.
 */
void ls_strategy_free(struct LsStrategy *handle);

/**
 * Exact expected competitive ratio for a target at signed distance `d`.
 *
 * # Safety
 * `handle` must be a live strategy handle; `out` must be writable.
 */
enum LsStatus ls_strategy_expected_cr(const struct LsStrategy *handle,
                                      double d,
                                      double tol,
                                      double *out);

/**
 * Worst expected ratio over targets in the first `rounds` rounds.
 *
 * # Safety
 * `handle` must be a live strategy handle; `out` must be writable.
 */
enum LsStatus ls_strategy_sup_cr(const struct LsStrategy *handle,
                                 size_t rounds,
                                 size_t samples_per_round,
                                 struct LsSupResult *out);

/**
 * Monte Carlo estimate of the detection time at `d`.
 *
 * # Safety
 * `handle` must be a live strategy handle; `out` must be writable.
 */
enum LsStatus ls_strategy_simulate(const struct LsStrategy *handle,
                                   double d,
                                   uint64_t trials,
                                   uint64_t seed,
                                   struct LsMonteCarlo *out);

/**
 * Tunes the hybrid strategy with the default budget.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_optimize_hybrid(double p, double v, struct LsTunedHybrid *out);

/**
 * Builds a `grid_n x grid_n` heatmap with the default optimizer budget.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum LsStatus ls_heatmap_new(enum LsQuantity q,
                             size_t grid_n,
                             double p_min,
                             double p_max,
                             double v_min,
                             double v_max,
                             uint64_t seed,
                             struct LsHeatmap **out);

/**
 * # Safety
 * `handle` must come from [`ls_heatmap_new`] and not be used afterwards.
 */
void ls_heatmap_free(struct LsHeatmap *handle);

/**
 * Number of points along the p and v axes.
 *
 * # Safety
 * `handle` must be live; `n_p` and `n_v` must be writable.
 */
enum LsStatus ls_heatmap_dims(const struct LsHeatmap *handle, size_t *n_p, size_t *n_v);

/**
 * Copies the values, rows by v then columns by p, into `buf`.
 *
 * # Safety
 * `handle` must be live; `buf` must have room for `len` doubles.
 */
enum LsStatus ls_heatmap_values(const struct LsHeatmap *handle, double *buf, size_t len);

/**
 * Heatmap as JSON; release with [`ls_string_free`]. Null on error.
 *
 * # Safety
 * `handle` must be a live heatmap handle or null.
 */
char *ls_heatmap_to_json(const struct LsHeatmap *handle);

/**
 * Heatmap as CSV; release with [`ls_string_free`]. Null on error.
 *
 * # Safety
 * `handle` must be a live heatmap handle or null.
 */
char *ls_heatmap_to_csv(const struct LsHeatmap *handle);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ls_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINESEARCH_H */
