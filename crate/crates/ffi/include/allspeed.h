#ifndef ALLSPEED_H
#define ALLSPEED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AllspeedCentral {
  ALLSPEED_CENTRAL_PLAIN_AVERAGE = 0,
  ALLSPEED_CENTRAL_MIM_ZERO = 1,
  ALLSPEED_CENTRAL_MIM_PRESSURE = 2,
  ALLSPEED_CENTRAL_MIM_MARCH = 3,
} AllspeedCentral;

/**
 * Dissipation schemes, in the order of the solver's scheme list.
 */
typedef enum AllspeedDissipation {
  ALLSPEED_DISSIPATION_ROE = 0,
  ALLSPEED_DISSIPATION_P_ROE = 1,
  ALLSPEED_DISSIPATION_A_ROE = 2,
  ALLSPEED_DISSIPATION_T_ROE = 3,
  ALLSPEED_DISSIPATION_LM_ROE = 4,
  ALLSPEED_DISSIPATION_A_ROE_NEW1 = 5,
  ALLSPEED_DISSIPATION_A_ROE_NEW2 = 6,
} AllspeedDissipation;

/**
 * Result code of every call.
 */
typedef enum AllspeedStatus {
  ALLSPEED_STATUS_OK = 0,
  ALLSPEED_STATUS_NULL_POINTER = 1,
  ALLSPEED_STATUS_INVALID_ARGUMENT = 2,
  ALLSPEED_STATUS_PARSE = 3,
  ALLSPEED_STATUS_CONFIG = 4,
  ALLSPEED_STATUS_INVALID_STATE = 5,
  ALLSPEED_STATUS_INVALID_GRID = 6,
  ALLSPEED_STATUS_NUMERICAL = 7,
  ALLSPEED_STATUS_BLOW_UP = 8,
  ALLSPEED_STATUS_IO = 9,
  ALLSPEED_STATUS_BUFFER_TOO_SMALL = 10,
  ALLSPEED_STATUS_PANIC = 11,
} AllspeedStatus;

/**
 * Opaque simulation handle.
 */
typedef struct AllspeedSimulation AllspeedSimulation;

/**
 * Summary of a completed run.
 */
typedef struct AllspeedRunReport {
  size_t iterations;
  /**
   * Non-zero when a steady run met its tolerance or a transient run
   * reached its end time.
   */
  int32_t converged;
  double final_residual;
  double time;
} AllspeedRunReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *allspeed_version(void);

/**
 * Copies the last error message of this thread into `buf`.
 *
 * # Safety
 * `buf` must point to `len` writable bytes or be null; `needed` must be
 * null or valid for writes.
 */
enum AllspeedStatus allspeed_last_error_message(char *buf, size_t len, size_t *needed);

/**
 * Builds a simulation from configuration text (the format read by the
 * command-line front end) and sets it to its initial state.
 *
 * # Safety
 * `config` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum AllspeedStatus allspeed_simulation_new(const char *config, struct AllspeedSimulation **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `sim` must come from [`allspeed_simulation_new`] and not be used again.
 */
void allspeed_simulation_free(struct AllspeedSimulation *sim);

/**
 * Writes the fully resolved configuration text of the simulation.
 *
 * # Safety
 * Pointer arguments follow [`allspeed_last_error_message`].
 */
enum AllspeedStatus allspeed_simulation_config(const struct AllspeedSimulation *sim,
                                               char *buf,
                                               size_t len,
                                               size_t *needed);

/**
 * Interior cell counts.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AllspeedStatus allspeed_simulation_dims(const struct AllspeedSimulation *sim,
                                             size_t *ni,
                                             size_t *nj);

/**
 * Advances `steps` iterations; the last step's density residual goes to
 * `*residual` when it is non-null. A blow-up leaves the field at the
 * last good state.
 *
 * # Safety
 * `sim` must be a live handle; `residual` null or valid.
 */
enum AllspeedStatus allspeed_simulation_step(struct AllspeedSimulation *sim,
                                             size_t steps,
                                             double *residual);

/**
 * Runs the configured march: to `t_final` for transient cases, to the
 * tolerance or the iteration cap for steady ones.
 *
 * # Safety
 * `sim` must be a live handle; `report` null or valid.
 */
enum AllspeedStatus allspeed_simulation_run(struct AllspeedSimulation *sim,
                                            struct AllspeedRunReport *report);

/**
 * Iteration count and physical (or pseudo) time reached.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AllspeedStatus allspeed_simulation_progress(const struct AllspeedSimulation *sim,
                                                 size_t *iteration,
                                                 double *time);

/**
 * Copies interior primitives `(rho, u, v, p)` per cell, row-major with `i`
 * fastest, into `buf` of `len` doubles (at least `4 ni nj`).
 *
 * # Safety
 * `buf` must point to `len` writable doubles.
 */
enum AllspeedStatus allspeed_simulation_primitives(const struct AllspeedSimulation *sim,
                                                   double *buf,
                                                   size_t len);

/**
 * Pressure fluctuation index `(p_max - p_min) / p_max` and the
 * checkerboard metric of the interior pressure (the latter is NaN on
 * grids narrower than four cells).
 *
 * # Safety
 * Pointers must be valid or null.
 */
enum AllspeedStatus allspeed_simulation_diagnostics(const struct AllspeedSimulation *sim,
                                                    double *ind,
                                                    double *checkerboard);

/**
 * Numerical flux per unit length through a face with unit normal
 * `(nx, ny)` between primitive states `left` and `right` (each
 * `rho, u, v, p`), for an ideal gas with `gamma = 1.4`. `m_ref` is the
 * global reference Mach number of the cut-offs; the interface smoothing
 * scales `rho*` and `u*` are one and `m_ref` respectively.
 *
 * # Safety
 * `left` and `right` must point to 4 doubles, `flux` to 4 writable ones.
 */
enum AllspeedStatus allspeed_interface_flux(enum AllspeedDissipation dissipation,
                                            enum AllspeedCentral central,
                                            double m_ref,
                                            const double *left,
                                            const double *right,
                                            double nx,
                                            double ny,
                                            double *flux);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALLSPEED_H */
