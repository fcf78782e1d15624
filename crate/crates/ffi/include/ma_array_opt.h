#ifndef MA_ARRAY_OPT_H
#define MA_ARRAY_OPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MaStatus {
  MA_STATUS_OK = 0,
  MA_STATUS_NULL_POINTER = 1,
  MA_STATUS_CONFIG = 2,
  MA_STATUS_INFEASIBLE = 3,
  MA_STATUS_NUMERIC = 4,
  MA_STATUS_UNSUPPORTED = 5,
  MA_STATUS_BUFFER_TOO_SMALL = 6,
  MA_STATUS_PANIC = 7,
} MaStatus;

typedef enum MaScheme {
  MA_SCHEME_MM = 0,
  MA_SCHEME_FPA = 1,
  MA_SCHEME_APS = 2,
  MA_SCHEME_AO = 3,
  MA_SCHEME_ORACLE = 4,
} MaScheme;

/**
 * Opaque scenario handle.
 */
typedef struct MaScenario MaScenario;

/**
 * Opaque solution handle.
 */
typedef struct MaSolution MaSolution;

/**
 * Solver options. Obtain defaults from [`ma_options_default`].
 */
typedef struct MaOptions {
  double tol;
  size_t max_iters;
  size_t multi_start;
  uint64_t seed;
  /**
   * Lattice spacing for `MA_SCHEME_ORACLE`.
   */
  double oracle_step;
} MaOptions;

typedef struct MaSummary {
  double lambda_max;
  double snr;
  double rate;
  double bound;
  size_t iterations;
  size_t n_antennas;
} MaSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *ma_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ma_version(void);

struct MaOptions ma_options_default(void);

/**
 * Creates a scenario. `angles` points to `n_receivers` angles in radians.
 *
 * # Safety
 * `angles` must be valid for `n_receivers` reads and `out` for one write.
 */
enum MaStatus ma_scenario_new(size_t n_antennas,
                              const double *angles,
                              size_t n_receivers,
                              double segment_length,
                              double min_spacing,
                              double wavelength,
                              double tx_power,
                              double noise_power,
                              struct MaScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle from [`ma_scenario_new`] not yet freed.
 */
void ma_scenario_free(struct MaScenario *scenario);

/**
 * Performance ceiling `M N` on the principal eigenvalue.
 *
 * # Safety
 * Pointers must be valid handles / writable.
 */
enum MaStatus ma_scenario_upper_bound(const struct MaScenario *scenario, double *out);

/**
 * Runs `scheme` (a [`MaScheme`] value) on `scenario`. `options` may be null
 * for defaults. Unknown scheme values yield `MA_STATUS_CONFIG`.
 *
 * # Safety
 * `scenario` must be a live handle, `options` null or valid, `out` writable.
 */
enum MaStatus ma_solve(const struct MaScenario *scenario,
                       uint32_t scheme,
                       const struct MaOptions *options,
                       struct MaSolution **out);

/**
 * # Safety
 * `solution` must be null or a handle from [`ma_solve`] not yet freed.
 */
void ma_solution_free(struct MaSolution *solution);

/**
 * # Safety
 * `solution` must be a live handle and `out` writable.
 */
enum MaStatus ma_solution_summary(const struct MaSolution *solution, struct MaSummary *out);

/**
 * Copies the `N` antenna positions into `buf`.
 *
 * # Safety
 * `buf` must be valid for `capacity` writes.
 */
enum MaStatus ma_solution_positions(const struct MaSolution *solution,
                                    double *buf,
                                    size_t capacity);

/**
 * Copies the beamformer as `2 N` interleaved `re, im` values.
 *
 * # Safety
 * `buf` must be valid for `capacity` writes.
 */
enum MaStatus ma_solution_beamformer(const struct MaSolution *solution,
                                     double *buf,
                                     size_t capacity);

/**
 * Number of entries [`ma_solution_trace`] will write (0 for non-iterative schemes).
 *
 * # Safety
 * `solution` must be a live handle and `out` writable.
 */
enum MaStatus ma_solution_trace_len(const struct MaSolution *solution, size_t *out);

/**
 * Copies `lambda_max` per iteration, starting with the initial layout.
 *
 * # Safety
 * `buf` must be valid for `capacity` writes.
 */
enum MaStatus ma_solution_trace(const struct MaSolution *solution, double *buf, size_t capacity);

/**
 * Beam gain `|a^H(x, theta) w|^2` of the solution at `theta` (radians).
 *
 * # Safety
 * `solution` must be a live handle and `out` writable.
 */
enum MaStatus ma_solution_beam_gain(const struct MaSolution *solution, double theta, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MA_ARRAY_OPT_H */
