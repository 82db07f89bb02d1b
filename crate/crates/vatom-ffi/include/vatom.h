#ifndef VATOM_H
#define VATOM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Dispersion model.
 */
typedef enum VatomModel {
  VATOM_MODEL_ANISOTROPIC = 0,
  VATOM_MODEL_ISOTROPIC = 1,
} VatomModel;

/**
 * Status codes. Zero is success.
 */
typedef enum VatomStatus {
  VATOM_STATUS_OK = 0,
  VATOM_STATUS_NULL_POINTER = 1,
  VATOM_STATUS_INVALID_ARGUMENT = 2,
  VATOM_STATUS_COMPUTATION = 3,
  VATOM_STATUS_NOT_FOUND = 4,
  VATOM_STATUS_PANIC = 5,
} VatomStatus;

/**
 * Opaque dressed-state spectrum.
 */
typedef struct VatomSpectrum VatomSpectrum;

/**
 * One dressed state.
 */
typedef struct VatomMode {
  double x_re;
  double x_im;
  double alpha1_re;
  double alpha1_im;
  double alpha2_re;
  double alpha2_im;
  /**
   * 1 for a bound (non-decaying) state
   */
  int32_t bound;
} VatomMode;

/**
 * Discretized-reservoir settings. `method` is 0 for the exponential
 * integrator and 1 for classical RK4.
 */
typedef struct VatomOracleConfig {
  size_t n_modes;
  double u_max;
  double dt;
  double taper;
  int32_t method;
} VatomOracleConfig;

/**
 * Oracle comparison summary.
 */
typedef struct VatomOracleReport {
  double max_deviation;
  double norm_drift;
  /**
   * negative when the doubling check was not requested
   */
  double convergence_shift;
} VatomOracleReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *vatom_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or
 * 0 when there is no error. `buf` may be NULL to query the length.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t vatom_last_error(char *buf, size_t len);

/**
 * Scaled complementary error function exp(z^2) erfc(z).
 *
 * # Safety
 * `out_re` and `out_im` must be valid for writes.
 */
enum VatomStatus vatom_erfcx(double re, double im, double *out_re, double *out_im);

/**
 * Number of bound dressed states (0, 1 or 2) for the given detunings.
 *
 * # Safety
 * `out_count` must be valid for writes.
 */
enum VatomStatus vatom_classify(enum VatomModel model,
                                double delta1,
                                double delta2,
                                uint32_t *out_count);

/**
 * Builds the dressed-state spectrum for a normalized initial state.
 *
 * # Safety
 * `out` must be valid for writes. On success `*out` owns a handle that
 * must be released with [`vatom_spectrum_free`].
 */
enum VatomStatus vatom_spectrum_new(enum VatomModel model,
                                    double delta1,
                                    double delta2,
                                    double a1_re,
                                    double a1_im,
                                    double a2_re,
                                    double a2_im,
                                    struct VatomSpectrum **out);

/**
 * Releases a spectrum. NULL is ignored.
 *
 * # Safety
 * `spectrum` must be NULL or a handle from [`vatom_spectrum_new`] not yet
 * freed.
 */
void vatom_spectrum_free(struct VatomSpectrum *spectrum);

/**
 * Number of dressed states, or 0 for NULL.
 *
 * # Safety
 * `spectrum` must be NULL or a live handle.
 */
size_t vatom_spectrum_mode_count(const struct VatomSpectrum *spectrum);

/**
 * Number of bound dressed states, or 0 for NULL.
 *
 * # Safety
 * `spectrum` must be NULL or a live handle.
 */
size_t vatom_spectrum_bound_count(const struct VatomSpectrum *spectrum);

/**
 * Copies dressed state `index`.
 *
 * # Safety
 * `spectrum` must be a live handle and `out` valid for writes.
 */
enum VatomStatus vatom_spectrum_mode(const struct VatomSpectrum *spectrum,
                                     size_t index,
                                     struct VatomMode *out);

/**
 * Beat frequency between the two populated bound states.
 * [`VatomStatus::NotFound`] when fewer than two bound states carry weight.
 *
 * # Safety
 * `spectrum` must be a live handle and `out` valid for writes.
 */
enum VatomStatus vatom_spectrum_rabi(const struct VatomSpectrum *spectrum, double *out);

/**
 * Evaluates A1, A2 at `n` times. `a1` and `a2` receive `2 n` doubles each.
 *
 * # Safety
 * `tau` must point to `n` readable doubles, `a1` and `a2` to `2 n`
 * writable doubles.
 */
enum VatomStatus vatom_spectrum_evaluate(const struct VatomSpectrum *spectrum,
                                         const double *tau,
                                         size_t n,
                                         double *a1,
                                         double *a2);

/**
 * Default oracle settings.
 */
struct VatomOracleConfig vatom_oracle_default_config(void);

/**
 * Compares the analytic populations with the discretized reservoir on
 * `steps` uniform points over [0, tau_max]. With `check_convergence`
 * nonzero the run is repeated at doubled resolution.
 *
 * # Safety
 * `config` must be readable and `out` writable.
 */
enum VatomStatus vatom_oracle_compare(enum VatomModel model,
                                      double delta1,
                                      double delta2,
                                      double theta,
                                      double tau_max,
                                      size_t steps,
                                      const struct VatomOracleConfig *config,
                                      int32_t check_convergence,
                                      struct VatomOracleReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VATOM_H */
