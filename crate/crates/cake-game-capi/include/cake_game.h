#ifndef CAKE_GAME_H
#define CAKE_GAME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum CgStatus {
  CgStatus_Ok = 0,
  /**
   * A null pointer, non-UTF-8 string, or out-of-range index.
   */
  CgStatus_InvalidArgument = 1,
  /**
   * The configuration failed to parse or validate.
   */
  CgStatus_BadConfig = 2,
  /**
   * The simulation itself failed.
   */
  CgStatus_RuntimeError = 3,
  /**
   * A panic was caught at the boundary.
   */
  CgStatus_Panic = 4,
} CgStatus;

/**
 * Opaque handle to a finished run.
 */
typedef struct CgRun CgRun;

/**
 * One completed round, in play order.
 */
typedef struct CgRound {
  /**
   * Alice's cut point in [0, 1].
   */
  double cut;
  /**
   * 0 if Bob took the left piece, 1 if the right.
   */
  int32_t choice;
  double u_alice;
  double u_bob;
} CgRound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Crate version as a static NUL-terminated string.
 */
const char *cg_version(void);

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *cg_last_error(void);

/**
 * Parses `config_json` (the same schema the CLI's `run` command reads),
 * plays the configured game in memory, and returns a handle through
 * `out_run`. No files are written. The handle must be released with
 * `cg_run_free`.
 *
 * # Safety
 * `config_json` must point to a NUL-terminated string and `out_run` to a
 * writable pointer slot.
 */
enum CgStatus cg_run_config_json(const char *config_json, struct CgRun **out_run);

/**
 * Number of completed rounds in the run.
 *
 * # Safety
 * `run` must be a live handle from `cg_run_config_json`.
 */
uintptr_t cg_run_rounds(const struct CgRun *run);

/**
 * Copies round `index` (0-based) into `out_round`.
 *
 * # Safety
 * `run` must be a live handle and `out_round` writable.
 */
enum CgStatus cg_run_round(const struct CgRun *run, uintptr_t index, struct CgRound *out_round);

/**
 * Totals and regrets as a JSON string owned by the run handle; the
 * pointer stays valid until `cg_run_free`.
 *
 * # Safety
 * `run` must be a live handle from `cg_run_config_json`.
 */
const char *cg_run_summary_json(const struct CgRun *run);

/**
 * Releases a run handle. Passing null is a no-op.
 *
 * # Safety
 * `run` must be null or a handle not yet freed.
 */
void cg_run_free(struct CgRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAKE_GAME_H */
