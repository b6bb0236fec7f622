#ifndef FLUCSTAT_H
#define FLUCSTAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FlucstatStatus {
  FLUCSTAT_STATUS_OK = 0,
  FLUCSTAT_STATUS_NULL_POINTER = 1,
  FLUCSTAT_STATUS_INVALID_ARGUMENT = 2,
  FLUCSTAT_STATUS_DOMAIN = 3,
  FLUCSTAT_STATUS_DEGENERATE = 4,
  FLUCSTAT_STATUS_INSUFFICIENT = 5,
  FLUCSTAT_STATUS_NO_CONVERGENCE = 6,
  FLUCSTAT_STATUS_IO = 7,
  FLUCSTAT_STATUS_PARSE = 8,
  FLUCSTAT_STATUS_BUFFER_TOO_SMALL = 9,
  FLUCSTAT_STATUS_PANIC = 10,
} FlucstatStatus;

/**
 * Opaque handle to a normalized return series.
 */
typedef struct FlucstatSeries FlucstatSeries;

/**
 * Result of a q-Gaussian density fit.
 */
typedef struct FlucstatQFit {
  double q;
  double b;
  double q_stderr;
  double b_stderr;
  double chi2_per_n;
  /**
   * NaN when undefined.
   */
  double r2;
  size_t n_points;
} FlucstatQFit;

/**
 * Result of a q-exponential autocorrelation fit.
 */
typedef struct FlucstatQexpFit {
  double q_c;
  double t;
  double q_c_stderr;
  double t_stderr;
  double chi2_per_n;
  double r2;
  size_t n_points;
} FlucstatQexpFit;

typedef struct FlucstatHurst {
  double h;
  double h_stderr;
  double r2;
  size_t n_scales;
} FlucstatHurst;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *flucstat_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *flucstat_version(void);

/**
 * Density of the q-Gaussian with index `q` and inverse width `b` at `x`.
 *
 * # Safety
 * `out` must be valid for one `double` write.
 */
enum FlucstatStatus flucstat_qgauss_pdf(double q, double b, double x, double *out);

/**
 * Symmetric stable density with characteristic function `exp(-a |k|^alpha)`.
 *
 * # Safety
 * `out` must be valid for one `double` write.
 */
enum FlucstatStatus flucstat_stable_pdf(double alpha, double a, double x, double tol, double *out);

/**
 * # Safety
 * `out` must be valid for one `double` write.
 */
enum FlucstatStatus flucstat_alpha_from_q(double q, double *out);

/**
 * # Safety
 * `out` must be valid for one `double` write.
 */
enum FlucstatStatus flucstat_q_from_alpha(double alpha, double *out);

/**
 * Fill `out[0..n]` with symmetric stable variates.
 *
 * # Safety
 * `out` must be valid for `n` `double` writes.
 */
enum FlucstatStatus flucstat_stable_sample(double alpha,
                                           double a,
                                           size_t n,
                                           uint64_t seed,
                                           double *out);

/**
 * Normalize `n` raw log-returns into a new series handle.
 *
 * # Safety
 * `values` must be valid for `n` reads and `out` for one pointer write.
 */
enum FlucstatStatus flucstat_series_from_values(const double *values,
                                                size_t n,
                                                struct FlucstatSeries **out);

/**
 * Read a `date,r` series file into a new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for one pointer write.
 */
enum FlucstatStatus flucstat_series_read(const char *path, struct FlucstatSeries **out);

/**
 * Release a handle. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void flucstat_series_free(struct FlucstatSeries *s);

/**
 * Number of returns, 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t flucstat_series_len(const struct FlucstatSeries *s);

/**
 * Copy the normalized returns into `out`, which holds `cap` values.
 *
 * # Safety
 * `s` must be a live handle and `out` valid for `cap` writes.
 */
enum FlucstatStatus flucstat_series_values(const struct FlucstatSeries *s, double *out, size_t cap);

/**
 * Autocorrelation at lags `0..=max_lag` of the returns, or of their
 * absolute values when `absolute` is nonzero. `out` needs `max_lag + 1` slots.
 *
 * # Safety
 * `s` must be a live handle and `out` valid for `cap` writes.
 */
enum FlucstatStatus flucstat_acf(const struct FlucstatSeries *s,
                                 size_t max_lag,
                                 int32_t absolute,
                                 double *out,
                                 size_t cap);

/**
 * Semilog q-Gaussian fit of the returns histogram. Bins are
 * `bin_width_sigma` standard deviations wide; a finite `fixed_q` holds q.
 *
 * # Safety
 * `s` must be a live handle and `out` valid for one write.
 */
enum FlucstatStatus flucstat_fit_qgaussian(const struct FlucstatSeries *s,
                                           double bin_width_sigma,
                                           double fixed_q,
                                           struct FlucstatQFit *out);

/**
 * q-exponential fit of the absolute-return autocorrelation over lags
 * `lag_lo..=lag_hi`.
 *
 * # Safety
 * `s` must be a live handle and `out` valid for one write.
 */
enum FlucstatStatus flucstat_fit_qexp_acf(const struct FlucstatSeries *s,
                                          size_t lag_lo,
                                          size_t lag_hi,
                                          struct FlucstatQexpFit *out);

/**
 * DFA Hurst exponent of the returns (or of `|r|` when `absolute` is
 * nonzero) over the default scale grid restricted to `scale_lo..=scale_hi`.
 *
 * # Safety
 * `s` must be a live handle and `out` valid for one write.
 */
enum FlucstatStatus flucstat_dfa_hurst(const struct FlucstatSeries *s,
                                       int32_t absolute,
                                       size_t detrend_order,
                                       size_t scale_lo,
                                       size_t scale_hi,
                                       struct FlucstatHurst *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLUCSTAT_H */
