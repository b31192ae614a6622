/* C interface to the hus planar stability library. */

#ifndef HUS_H
#define HUS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HusStatus {
  HUS_STATUS_OK = 0,
  HUS_STATUS_NULL_POINTER = 1,
  HUS_STATUS_NON_FINITE = 2,
  HUS_STATUS_SINGULAR = 3,
  HUS_STATUS_NOT_STABLE = 4,
  HUS_STATUS_IS_STABLE = 5,
  HUS_STATUS_HORIZON_TOO_LARGE = 6,
  HUS_STATUS_RESONANT = 7,
  HUS_STATUS_INVALID_PERTURBATION = 8,
  HUS_STATUS_INVALID_ARGUMENT = 9,
  HUS_STATUS_INCOMPATIBLE_SUBSTITUTION = 10,
  HUS_STATUS_DEGENERATE_CLASS = 11,
  HUS_STATUS_CASE_MISMATCH = 12,
  HUS_STATUS_OUT_OF_RANGE = 13,
  HUS_STATUS_PANIC = 99,
} HusStatus;

/**
 * Opaque stability report.
 */
typedef struct HusReport HusReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never null.
 */
const char *hus_status_message(enum HusStatus status);

/**
 * Analyzes the row-major matrix `m[4]`. On success `*out` owns a new report.
 *
 * # Safety
 * `m` must point to four doubles and `out` to writable storage for a pointer.
 */
enum HusStatus hus_analyze(const double *m, double tol, struct HusReport **out);

/**
 * Releases a report. Null is ignored.
 *
 * # Safety
 * `report` must come from [`hus_analyze`] and not be used afterwards.
 */
void hus_report_free(struct HusReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum HusStatus hus_report_stable(const struct HusReport *report, int *out);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum HusStatus hus_report_marginal(const struct HusReport *report, int *out);

/**
 * The reported constant `K`; `HUS_STATUS_NOT_STABLE` when none exists.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum HusStatus hus_report_k(const struct HusReport *report, double *out);

/**
 * `‖A⁻¹‖∞`; `HUS_STATUS_NOT_STABLE` when none exists.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum HusStatus hus_report_lower_bound(const struct HusReport *report, double *out);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum HusStatus hus_report_best(const struct HusReport *report, int *out);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum HusStatus hus_report_candidate_count(const struct HusReport *report, size_t *out);

/**
 * Candidate `index`: its value and a static label string. Either out
 * pointer may be null.
 *
 * # Safety
 * `report` must be a live handle; non-null out pointers must be writable.
 */
enum HusStatus hus_report_candidate(const struct HusReport *report,
                                    size_t index,
                                    double *value,
                                    const char **label);

/**
 * The report as JSON. Release `*out` with [`hus_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum HusStatus hus_report_json(const struct HusReport *report, char **out);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void hus_string_free(char *s);

/**
 * `out[4] = e^{tA}` for the row-major `m[4]`.
 *
 * # Safety
 * `m` must point to four doubles and `out` to four writable doubles.
 */
enum HusStatus hus_expm(const double *m, double t, double *out);

/**
 * Certifies the constant, sinusoid and sign-switch families along the
 * lower-bound maximizer. Writes the largest `sup‖φ − x‖∞ / ε` and whether
 * every run stayed under its threshold.
 *
 * # Safety
 * `m` must point to four doubles; `max_ratio` and `all_pass` must be writable.
 */
enum HusStatus hus_certify(const double *m,
                           double epsilon,
                           double horizon,
                           double step,
                           double omega,
                           double period,
                           double tol,
                           double *max_ratio,
                           int *all_pass);

/**
 * The repeated root `λ*` at which the direct-substitution constant switches
 * between its two branches.
 */
double hus_repeated_root_threshold(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HUS_H */
