#ifndef MISPACE_H
#define MISPACE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MispaceStatus {
  MISPACE_STATUS_OK = 0,
  MISPACE_STATUS_NULL_POINTER = 1,
  MISPACE_STATUS_INVALID_ARGUMENT = 2,
  MISPACE_STATUS_IO = 3,
  MISPACE_STATUS_PARSE = 4,
  MISPACE_STATUS_DIMENSION = 5,
  MISPACE_STATUS_CONTRACT = 6,
  MISPACE_STATUS_HYPOTHESIS = 7,
  MISPACE_STATUS_ZERO_MATRIX = 8,
  MISPACE_STATUS_VALIDATION = 9,
  MISPACE_STATUS_INTERNAL = 10,
} MispaceStatus;

/**
 * Opaque model handle.
 */
typedef struct MispaceModel MispaceModel;

/**
 * Numerical tolerances; pass `NULL` wherever accepted to use the defaults.
 */
typedef struct MispaceOptions {
  double rank_rtol;
  double abs_floor;
  double intersection_tol;
  double ae_exception_fraction;
} MispaceOptions;

/**
 * Outcome of `mispace_certify_frame`.
 */
typedef struct MispaceFrameResult {
  /**
   * 1 if the reduction is certified to preserve frames, else 0.
   */
  int32_t certified;
  /**
   * 1 if every generator fiber is preserved (a.e.), else 0.
   */
  int32_t generator_preserving;
  /**
   * Infimum over the grid of the sine between `Im G(omega)` and `Ker A`.
   */
  double delta;
  /**
   * Predicted frame bounds; zero when not certified.
   */
  double predicted_lower;
  double predicted_upper;
  /**
   * Frame bounds measured on the reduced Gramian.
   */
  double measured_lower;
  double measured_upper;
} MispaceFrameResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or `NULL`. The pointer
 * stays valid until the next call into the library from the same thread.
 */
const char *mispace_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mispace_version(void);

/**
 * Default tolerances.
 */
struct MispaceOptions mispace_options_default(void);

/**
 * Loads a model, translate-system or action-system file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MispaceStatus mispace_model_load(const char *path, struct MispaceModel **out);

/**
 * The two-generator `(sin 2 pi w, cos 2 pi w)` model on an `n x n` grid.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MispaceStatus mispace_model_sincos(size_t grid_n, struct MispaceModel **out);

/**
 * Releases a model. `NULL` is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void mispace_model_free(struct MispaceModel *model);

/**
 * Number of grid points, fiber dimension and number of generators.
 *
 * # Safety
 * `model` must be a live handle; each output pointer must be valid.
 */
enum MispaceStatus mispace_model_shape(const struct MispaceModel *model,
                                       size_t *points,
                                       size_t *fiber_dim,
                                       size_t *generators);

/**
 * Length: largest Gramian rank over the grid.
 *
 * # Safety
 * `model` must be a live handle, `opts` `NULL` or valid, `out` valid.
 */
enum MispaceStatus mispace_model_length(const struct MispaceModel *model,
                                        const struct MispaceOptions *opts,
                                        size_t *out);

/**
 * Extreme positive Gramian eigenvalues; both are zero for a zero model.
 *
 * # Safety
 * `model` must be a live handle, `opts` `NULL` or valid, outputs valid.
 */
enum MispaceStatus mispace_model_frame_bounds(const struct MispaceModel *model,
                                              const struct MispaceOptions *opts,
                                              double *alpha,
                                              double *beta);

/**
 * Whether the `rows x cols` matrix preserves the generator fibers; writes 1 or 0.
 *
 * # Safety
 * `data` must hold `2 * rows * cols` doubles; the other pointers as above.
 */
enum MispaceStatus mispace_is_generator_preserving(const struct MispaceModel *model,
                                                   size_t rows,
                                                   size_t cols,
                                                   const double *data,
                                                   const struct MispaceOptions *opts,
                                                   int32_t *out);

/**
 * Frame certificate for the `rows x cols` reduction matrix.
 *
 * # Safety
 * `data` must hold `2 * rows * cols` doubles; the other pointers as above.
 */
enum MispaceStatus mispace_certify_frame(const struct MispaceModel *model,
                                         size_t rows,
                                         size_t cols,
                                         const double *data,
                                         const struct MispaceOptions *opts,
                                         struct MispaceFrameResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MISPACE_H */
