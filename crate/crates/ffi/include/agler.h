#ifndef AGLER_H
#define AGLER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a library call. Non-negative values are successful outcomes.
 */
typedef enum AglerCode {
  AGLER_CODE_OK = 0,
  /**
   * The call succeeded and the polynomial is not certified.
   */
  AGLER_CODE_NOT_CERTIFIED = 1,
  AGLER_CODE_NULL_POINTER = -1,
  AGLER_CODE_INVALID_INPUT = -2,
  AGLER_CODE_UNSTABLE = -3,
  AGLER_CODE_NO_CONVERGENCE = -4,
  AGLER_CODE_DEGREE_CAP = -5,
  AGLER_CODE_JSON = -6,
  AGLER_CODE_NUMERICAL = -7,
  AGLER_CODE_PANIC = -8,
} AglerCode;

/**
 * Verdict of the PSD test.
 */
typedef enum AglerStatus {
  AGLER_STATUS_AGLER_DENOMINATOR = 0,
  AGLER_STATUS_BOUNDARY = 1,
  AGLER_STATUS_NOT_CERTIFIED = 2,
} AglerStatus;

/**
 * Three-variable decomposition and its sampled residual.
 */
typedef struct AglerKummert AglerKummert;

/**
 * Symmetric multi-affine polynomial.
 */
typedef struct AglerPoly AglerPoly;

/**
 * Certification outcome, with the certificate when one exists.
 */
typedef struct AglerReport AglerReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *agler_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *agler_version(void);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must be null or a pointer returned by a `*_to_json` function that has
 * not been freed.
 */
void agler_string_free(char *s);

/**
 * Builds a polynomial from its `len = d + 1` weights.
 *
 * # Safety
 * `re` must point to `len` doubles; `im` must be null or point to `len`
 * doubles; `out` must be a valid pointer.
 */
enum AglerCode agler_poly_new(const double *re,
                              const double *im,
                              size_t len,
                              struct AglerPoly **out);

/**
 * Symmetrizes the univariate polynomial with `len` coefficients into `d`
 * variables.
 *
 * # Safety
 * As for [`agler_poly_new`].
 */
enum AglerCode agler_poly_symmetrize(const double *re,
                                     const double *im,
                                     size_t len,
                                     size_t d,
                                     struct AglerPoly **out);

/**
 * Parses `{"d": ..., "weights": [[re, im], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum AglerCode agler_poly_from_json(const char *json, struct AglerPoly **out);

/**
 * Number of variables, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t agler_poly_degree(const struct AglerPoly *p);

/**
 * # Safety
 * `p` must be null or a handle from this library that has not been freed.
 */
void agler_poly_free(struct AglerPoly *p);

/**
 * Runs the PSD test with band `tol` (non-positive selects the default). When
 * certified, extracts the certificate and samples its residual at `samples`
 * points from `seed`. Returns `Ok` or `NotCertified` with a report in `out`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be a valid pointer.
 */
enum AglerCode agler_certify(const struct AglerPoly *p,
                             double tol,
                             size_t samples,
                             uint64_t seed,
                             struct AglerReport **out);

/**
 * # Safety
 * `r` must be a live handle.
 */
enum AglerStatus agler_report_status(const struct AglerReport *r);

/**
 * Smallest eigenvalue of the subset matrix; NaN for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double agler_report_min_eigenvalue(const struct AglerReport *r);

/**
 * Sampled certificate residual; NaN when there is no certificate.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double agler_report_residual(const struct AglerReport *r);

/**
 * Number of squares in the certificate; 0 when there is none.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t agler_report_rank(const struct AglerReport *r);

/**
 * `{"report": ..., "certificate": ... | null}`; null on failure.
 *
 * # Safety
 * `r` must be a live handle. Free the result with [`agler_string_free`].
 */
char *agler_report_to_json(const struct AglerReport *r);

/**
 * # Safety
 * `r` must be null or a handle from this library that has not been freed.
 */
void agler_report_free(struct AglerReport *r);

/**
 * Closed-form four-variable test.
 *
 * # Safety
 * `p` must be a live handle; `lhs`, `rhs` and `pass` must be valid pointers.
 */
enum AglerCode agler_degree4(const struct AglerPoly *p,
                             double tol,
                             double *lhs,
                             double *rhs,
                             bool *pass);

/**
 * Agler radius with the default scan; `r_hi` not finite or non-positive
 * selects the stability radius.
 *
 * # Safety
 * `p` must be a live handle; `radius` must be a valid pointer.
 */
enum AglerCode agler_radius_scan(const struct AglerPoly *p, double r_hi, double *radius);

/**
 * Three-variable decomposition of the polynomial with coefficients indexed
 * by bitmask (bit 0: `z1`, bit 1: `z2`, bit 2: `z3`).
 *
 * # Safety
 * `re` must point to 8 doubles; `im` must be null or point to 8 doubles;
 * `out` must be a valid pointer.
 */
enum AglerCode agler_kummert(const double *re,
                             const double *im,
                             size_t samples,
                             uint64_t seed,
                             struct AglerKummert **out);

/**
 * Sampled decomposition residual; NaN for a null handle.
 *
 * # Safety
 * `k` must be null or a live handle.
 */
double agler_kummert_residual(const struct AglerKummert *k);

/**
 * Full report as JSON; null on failure.
 *
 * # Safety
 * `k` must be a live handle. Free the result with [`agler_string_free`].
 */
char *agler_kummert_to_json(const struct AglerKummert *k);

/**
 * # Safety
 * `k` must be null or a handle from this library that has not been freed.
 */
void agler_kummert_free(struct AglerKummert *k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AGLER_H */
