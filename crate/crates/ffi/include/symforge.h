#ifndef SYMFORGE_H
#define SYMFORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Classical functions held by [`SfClassicalSet`].
typedef enum SfFunction {
  SF_FUNCTION_H = 0,
  SF_FUNCTION_H_PHI = 1,
  SF_FUNCTION_O = 2,
  SF_FUNCTION_E = 3,
} SfFunction;

typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_ARGUMENT = 2,
  SF_STATUS_DOMAIN = 3,
  // The integrator stopped early; a partial trajectory is still returned.
  SF_STATUS_INTEGRATION = 4,
  SF_STATUS_SPECTRAL = 5,
  SF_STATUS_INTERNAL = 6,
  SF_STATUS_PANIC = 7,
} SfStatus;

typedef enum SfTarget {
  SF_TARGET_CLASSICAL = 0,
  SF_TARGET_QUANTUM = 1,
  SF_TARGET_ALL = 2,
} SfTarget;

// Opaque classical symmetry set for one ratio `k = m/n`.
typedef struct SfClassicalSet SfClassicalSet;

// Opaque integrated trajectory.
typedef struct SfTrajectory SfTrajectory;

typedef struct SfPhaseState {
  double theta;
  double phi;
  double p_theta;
  double p_phi;
} SfPhaseState;

// One trajectory sample with its conservation ledger.
typedef struct SfSample {
  double t;
  double theta;
  double phi;
  double p_theta;
  double p_phi;
  double h;
  double hphi;
  double o;
  double e;
} SfSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. The pointer stays
// valid until the next failing call on the same thread.
const char *sf_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *sf_version(void);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void sf_string_free(char *s);

// Build `H, H_φ, O, E` for `k = m/n`.
//
// # Safety
// `out` must be a valid pointer.
enum SfStatus sf_classical_new(uint32_t m, uint32_t n, struct SfClassicalSet **out);

// # Safety
// `set` must come from [`sf_classical_new`] or be NULL.
void sf_classical_free(struct SfClassicalSet *set);

// Canonical text of one function; free the result with [`sf_string_free`].
//
// # Safety
// `set` must be a live handle and `out` a valid pointer.
enum SfStatus sf_classical_text(const struct SfClassicalSet *set,
                                enum SfFunction which,
                                char **out);

// Evaluate one function at a phase-space point; the value is real for all
// four functions.
//
// # Safety
// `set` must be a live handle, `state` and `out` valid pointers.
enum SfStatus sf_classical_eval(const struct SfClassicalSet *set,
                                enum SfFunction which,
                                const struct SfPhaseState *state,
                                double alpha2,
                                double *out);

// Run verification suites. `m = n = 0` sweeps every admissible ratio. The
// JSON report (without timings) goes to `out_json`; `out_passed` is set to
// whether no entry failed.
//
// # Safety
// `out_json` and `out_passed` must be valid pointers.
enum SfStatus sf_verify(enum SfTarget target,
                        uint32_t m,
                        uint32_t n,
                        uint64_t seed,
                        char **out_json,
                        bool *out_passed);

// Integrate the orbit of `k = m/n` from `initial` to `t_max`, sampled every
// `sample_dt`. On [`SfStatus::Integration`] `*out` still receives the
// partial trajectory.
//
// # Safety
// `initial` and `out` must be valid pointers.
enum SfStatus sf_integrate(uint32_t m,
                           uint32_t n,
                           double alpha2,
                           const struct SfPhaseState *initial,
                           double t_max,
                           double tol,
                           double sample_dt,
                           struct SfTrajectory **out);

// # Safety
// `traj` must come from [`sf_integrate`] or be NULL.
void sf_trajectory_free(struct SfTrajectory *traj);

// Number of samples; 0 for NULL.
//
// # Safety
// `traj` must be a live handle or NULL.
size_t sf_trajectory_len(const struct SfTrajectory *traj);

// # Safety
// `traj` must be a live handle and `out` a valid pointer.
enum SfStatus sf_trajectory_sample(const struct SfTrajectory *traj,
                                   size_t index,
                                   struct SfSample *out);

// Largest relative drift of `H, H_φ, O, E`; NaN for NULL.
//
// # Safety
// `traj` must be a live handle or NULL.
double sf_trajectory_max_drift(const struct SfTrajectory *traj);

// Lowest `count` eigenvalues of the φ problem (`alpha2`) on `grid` points.
//
// # Safety
// `out` must point to `count` writable doubles.
enum SfStatus sf_phi_levels(double alpha2, size_t grid, size_t count, double *out);

// Lowest `count` eigenvalues of the θ problem with parameter `big_m`.
//
// # Safety
// `out` must point to `count` writable doubles.
enum SfStatus sf_theta_levels(double big_m, size_t grid, size_t count, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMFORGE_H */
