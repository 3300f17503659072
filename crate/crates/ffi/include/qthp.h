#ifndef QTHP_H
#define QTHP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QthpStatus {
  QTHP_STATUS_OK = 0,
  QTHP_STATUS_NULL_POINTER = 1,
  QTHP_STATUS_INVALID_ARGUMENT = 2,
  QTHP_STATUS_INVALID_STRATEGY = 3,
  QTHP_STATUS_INVALID_GAME = 4,
  QTHP_STATUS_NO_BRACKET = 5,
  QTHP_STATUS_GRID_TOO_COARSE = 6,
  QTHP_STATUS_NUMERIC = 7,
  QTHP_STATUS_PANIC = 8,
} QthpStatus;

typedef enum QthpEquilibrium {
  QTHP_EQUILIBRIUM_STRICT = 0,
  QTHP_EQUILIBRIUM_WEAK = 1,
  QTHP_EQUILIBRIUM_NOT_EQUILIBRIUM = 2,
} QthpEquilibrium;

/**
 * Opaque game handle.
 */
typedef struct QthpGame QthpGame;

/**
 * Pure strategy: Euler angles in radians and the number of active ones (1 to 3).
 * Inactive angles must be zero.
 */
typedef struct QthpStrategy {
  double theta;
  double alpha;
  double beta;
  uint32_t dims;
} QthpStrategy;

/**
 * A player's strategy, trembled around `strategy` with concentration `kappa`
 * when `trembled` is set.
 */
typedef struct QthpSide {
  struct QthpStrategy strategy;
  bool trembled;
  double kappa;
} QthpSide;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builtin game by name: `PD`, `EG` or `SH` (case-insensitive).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum QthpStatus qthp_game_builtin(const char *name, struct QthpGame **out);

/**
 * Game from two row-major 2x2 payoff matrices (rows: Alice's move C, D).
 *
 * # Safety
 * `a` and `b` must point to 4 readable doubles each; `name` may be null.
 */
enum QthpStatus qthp_game_from_matrices(const char *name,
                                        const double *a,
                                        const double *b,
                                        struct QthpGame **out);

/**
 * Game from the JSON game-file format.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum QthpStatus qthp_game_from_json(const char *json, struct QthpGame **out);

/**
 * # Safety
 * `game` must come from one of the constructors and not be freed twice. Null is ignored.
 */
void qthp_game_free(struct QthpGame *game);

/**
 * Payoffs `(Alice, Bob)` of a pure strategy profile.
 *
 * # Safety
 * `game` must be a live handle; `out_a` and `out_b` writable.
 */
enum QthpStatus qthp_expected_payoff(const struct QthpGame *game,
                                     struct QthpStrategy alice,
                                     struct QthpStrategy bob,
                                     double *out_a,
                                     double *out_b);

/**
 * Expected payoffs when either side may tremble; `quad_nodes == 0` uses the
 * default quadrature.
 *
 * # Safety
 * `game` must be a live handle; `out_a` and `out_b` writable.
 */
enum QthpStatus qthp_smeared_payoff(const struct QthpGame *game,
                                    struct QthpSide alice,
                                    struct QthpSide bob,
                                    uint32_t quad_nodes,
                                    double *out_a,
                                    double *out_b);

/**
 * Classifies a pure profile with both strategies embedded in `dims` parameters.
 *
 * # Safety
 * `game` must be a live handle; `out` writable.
 */
enum QthpStatus qthp_check_equilibrium(const struct QthpGame *game,
                                       struct QthpStrategy alice,
                                       struct QthpStrategy bob,
                                       uint32_t dims,
                                       uint32_t grid_nodes,
                                       enum QthpEquilibrium *out);

/**
 * Concentration at which the profile becomes (or stops being) robust, using
 * default scan settings for `tremble_dims`. Returns `NoBracket` when the
 * verdict agrees at both ends.
 *
 * # Safety
 * `game` must be a live handle; `out_kappa` writable.
 */
enum QthpStatus qthp_threshold_search(const struct QthpGame *game,
                                      struct QthpStrategy alice,
                                      struct QthpStrategy bob,
                                      uint32_t tremble_dims,
                                      double kappa_lo,
                                      double kappa_hi,
                                      double tol,
                                      double *out_kappa);

/**
 * Modified Bessel function of the first kind, order a multiple of 1/2.
 *
 * # Safety
 * `out` must be writable.
 */
enum QthpStatus qthp_bessel_i(double nu, double x, double *out);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *qthp_last_error_message(void);

const char *qthp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTHP_H */
