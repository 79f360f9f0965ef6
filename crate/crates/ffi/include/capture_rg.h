#ifndef CAPTURE_RG_H
#define CAPTURE_RG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CrgStatus {
  CRG_STATUS_OK = 0,
  CRG_STATUS_NULL_POINTER = 1,
  CRG_STATUS_INVALID_ARGUMENT = 2,
  CRG_STATUS_NON_ZERO_CONSTANT = 3,
  CRG_STATUS_SOLVER_DEGENERATE = 4,
  CRG_STATUS_ROW_OUT_OF_RANGE = 5,
  CRG_STATUS_BREAKDOWN = 6,
  CRG_STATUS_POLE = 7,
  CRG_STATUS_STIFFNESS = 8,
  CRG_STATUS_TRACE_INCOMPLETE = 9,
  CRG_STATUS_BRACKET = 10,
  CRG_STATUS_UNDECIDED = 11,
  CRG_STATUS_INSUFFICIENT_DATA = 12,
  CRG_STATUS_DEGENERATE_FIT = 13,
  CRG_STATUS_INTERNAL = 14,
  CRG_STATUS_PANIC = 15,
} CrgStatus;

typedef enum CrgCriticalQuantity {
  /**
   * `εz_c`.
   */
  CRG_CRITICAL_QUANTITY_ZC = 0,
  /**
   * `εx_c`.
   */
  CRG_CRITICAL_QUANTITY_XC = 1,
} CrgCriticalQuantity;

typedef enum CrgFate {
  CRG_FATE_CAPTURE = 0,
  CRG_FATE_ESCAPE = 1,
  CRG_FATE_UNDECIDED = 2,
} CrgFate;

typedef enum CrgBranch {
  CRG_BRANCH_PLUS = 0,
  CRG_BRANCH_MINUS = 1,
} CrgBranch;

typedef enum CrgMethod {
  CRG_METHOD_MATCHED = 0,
  CRG_METHOD_RG = 1,
} CrgMethod;

/**
 * Exact separatrix coefficients `B_0..B_max_order`.
 */
typedef struct CrgCoefficientTable CrgCoefficientTable;

/**
 * Series for `εz_c` and `εx_c` at a fixed order.
 */
typedef struct CrgCriticalSeries CrgCriticalSeries;

/**
 * Integrator settings. Obtain defaults from [`crg_integrator_default`].
 */
typedef struct CrgIntegratorConfig {
  double rel_tol;
  double abs_tol;
  /**
   * Time budget.
   */
  double t_max;
  double max_step;
} CrgIntegratorConfig;

typedef struct CrgXcEstimate {
  double xc;
  double lo;
  double hi;
  size_t probes;
} CrgXcEstimate;

typedef struct CrgSeparatrixTrace {
  double delta;
  double xc;
  double uc;
  double t_cross;
  double zc;
  double error_estimate;
} CrgSeparatrixTrace;

typedef struct CrgDombSykes {
  /**
   * Fitted offset.
   */
  double delta;
  /**
   * Offset used in the growth fit.
   */
  double delta_used;
  double growth;
  size_t offset_lo;
  size_t offset_hi;
  size_t growth_lo;
  size_t growth_hi;
} CrgDombSykes;

/**
 * Constants of the closed-form solutions. `inv_c` is `1/C`, zero on the separatrix.
 */
typedef struct CrgSolutionConstants {
  double inv_c;
  double b;
  double d;
  double epsilon;
} CrgSolutionConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread (empty if none).
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *crg_last_error_message(void);

/**
 * Library version, a static string.
 */
const char *crg_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void crg_string_free(char *s);

/**
 * Parses a `"p/q"` string and writes its nearest `double`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be writable.
 */
enum CrgStatus crg_rational_to_double(const char *text, double *out);

/**
 * # Safety
 * `out` must be writable. The handle is released with [`crg_coefficients_free`].
 */
enum CrgStatus crg_coefficients_new(size_t max_order, struct CrgCoefficientTable **out);

/**
 * # Safety
 * `table` must come from [`crg_coefficients_new`] and not be used afterwards. Null is ignored.
 */
void crg_coefficients_free(struct CrgCoefficientTable *table);

/**
 * Number of coefficients held (`max_order + 1`); 0 for null.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t crg_coefficients_len(const struct CrgCoefficientTable *table);

/**
 * `B_n` as a newly allocated `"p/q"` string.
 *
 * # Safety
 * `table` must be a live handle; `out` must be writable.
 */
enum CrgStatus crg_coefficients_get(const struct CrgCoefficientTable *table, size_t n, char **out);

/**
 * `b_n = n!(n+1)! B_n` as a decimal string.
 *
 * # Safety
 * `table` must be a live handle; `out` must be writable.
 */
enum CrgStatus crg_coefficients_get_integer(const struct CrgCoefficientTable *table,
                                            size_t n,
                                            char **out);

/**
 * # Safety
 * `out` must be writable. The handle is released with [`crg_critical_free`].
 */
enum CrgStatus crg_critical_new(size_t order, struct CrgCriticalSeries **out);

/**
 * # Safety
 * `series` must come from [`crg_critical_new`] and not be used afterwards. Null is ignored.
 */
void crg_critical_free(struct CrgCriticalSeries *series);

/**
 * Series order; 0 for null.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
size_t crg_critical_order(const struct CrgCriticalSeries *series);

/**
 * Coefficient of `θ^n` (`0 <= n <= order`) as a `"p/q"` string.
 *
 * # Safety
 * `series` must be a live handle; `out` must be writable.
 */
enum CrgStatus crg_critical_term(const struct CrgCriticalSeries *series,
                                 enum CrgCriticalQuantity which,
                                 size_t n,
                                 char **out);

/**
 * Partial sum through `θ^n` (`1 <= n <= order`) as a `"p/q"` string.
 *
 * # Safety
 * `series` must be a live handle; `out` must be writable.
 */
enum CrgStatus crg_critical_partial_sum(const struct CrgCriticalSeries *series,
                                        enum CrgCriticalQuantity which,
                                        size_t n,
                                        char **out);

struct CrgIntegratorConfig crg_integrator_default(void);

/**
 * Fate of `x(0) = x0`, `ẋ(0) = u0`; `t_event` may be null.
 *
 * # Safety
 * `cfg` must be null or readable; `fate` must be writable; `t_event` null or writable.
 */
enum CrgStatus crg_classify_fate(double x0,
                                 double u0,
                                 const struct CrgIntegratorConfig *cfg,
                                 enum CrgFate *fate,
                                 double *t_event);

/**
 * Bisection for the critical release point on `u0 = -x0²` within `[lo, hi]`.
 *
 * # Safety
 * `cfg` must be null or readable; `out` must be writable.
 */
enum CrgStatus crg_find_xc(double lo,
                           double hi,
                           double tol,
                           const struct CrgIntegratorConfig *cfg,
                           struct CrgXcEstimate *out);

/**
 * Backward numerical trace of the separatrix to the nullcline.
 *
 * # Safety
 * `cfg` must be null or readable; `out` must be writable.
 */
enum CrgStatus crg_trace_separatrix(double delta,
                                    const struct CrgIntegratorConfig *cfg,
                                    struct CrgSeparatrixTrace *out);

/**
 * Domb-Sykes fits over `B_0..B_max_order`.
 *
 * `window_lo = window_hi = 0` selects the default windows; a NaN `delta`
 * uses the fitted offset in the growth fit.
 *
 * # Safety
 * `out` must be writable.
 */
enum CrgStatus crg_domb_sykes(size_t max_order,
                              size_t window_lo,
                              size_t window_hi,
                              double delta,
                              struct CrgDombSykes *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum CrgStatus crg_constants_from_ic(double x0,
                                     double u0,
                                     double epsilon,
                                     enum CrgBranch branch,
                                     struct CrgSolutionConstants *out);

/**
 * `x(t)` and `ẋ(t)` of the chosen closed-form solution; `u` may be null.
 *
 * # Safety
 * `constants` must be readable; `x` writable; `u` null or writable.
 */
enum CrgStatus crg_solution_eval(const struct CrgSolutionConstants *constants,
                                 enum CrgMethod method,
                                 double t,
                                 double *x,
                                 double *u);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAPTURE_RG_H */
