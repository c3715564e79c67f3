#ifndef SOSIDENT_H
#define SOSIDENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SosHessianMode {
  SOS_HESSIAN_MODE_COMBINATION = 0,
  SOS_HESSIAN_MODE_FULL_STACK = 1,
} SosHessianMode;

typedef enum SosStatus {
  SOS_STATUS_OK = 0,
  SOS_STATUS_NULL_POINTER = 1,
  SOS_STATUS_INVALID_PARAMS = 2,
  SOS_STATUS_ODD_DEGREE = 3,
  SOS_STATUS_BAD_MODULUS = 4,
  SOS_STATUS_NOT_SUBGENERIC = 5,
  SOS_STATUS_DEPENDENT_INPUT = 6,
  SOS_STATUS_PARSE = 7,
  SOS_STATUS_ARITHMETIC = 8,
  SOS_STATUS_PANIC = 9,
} SosStatus;

/**
 * Identifiability certificate.
 */
typedef struct SosCertificate SosCertificate;

/**
 * Secant dimension report.
 */
typedef struct SosDimensionReport SosDimensionReport;

/**
 * A form over Z/p.
 */
typedef struct SosPoly SosPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Owned by the
 * library.
 */
const char *sos_last_error(void);

/**
 * Releases a string returned by a `_to_json` function.
 *
 * # Safety
 * `s` must be null or a string from this library, not yet freed.
 */
void sos_string_free(char *s);

/**
 * `r N - C(r, 2)` with `N = C(d/2 + n, n)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SosStatus sos_expected_dim(size_t n, size_t d, size_t r, size_t *out);

/**
 * Least `r` whose expected dimension fills the degree-`d` forms.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SosStatus sos_generic_rank(size_t n, size_t d, size_t *out);

/**
 * Generic identifiability certificate for `(n, d, r)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SosStatus sos_identifiable(size_t n,
                                size_t d,
                                size_t r,
                                uint32_t p,
                                uint64_t seed,
                                size_t trials,
                                enum SosHessianMode hessian,
                                struct SosCertificate **out);

/**
 * 1 when certified, 0 when inconclusive, -1 for a null handle.
 *
 * # Safety
 * `cert` must be null or a live handle.
 */
int32_t sos_certificate_is_certified(const struct SosCertificate *cert);

/**
 * Writes the Terracini, Hessian and target ranks.
 *
 * # Safety
 * `cert` must be null or a live handle; the outputs must be writable.
 */
enum SosStatus sos_certificate_ranks(const struct SosCertificate *cert,
                                     size_t *terracini_rank,
                                     size_t *hessian_rank,
                                     size_t *target_rank);

/**
 * # Safety
 * `cert` must be null or a live handle; `out` must be writable.
 */
enum SosStatus sos_certificate_to_json(const struct SosCertificate *cert, char **out);

/**
 * # Safety
 * `cert` must be null or a handle not yet freed.
 */
void sos_certificate_free(struct SosCertificate *cert);

/**
 * Sampled Terracini rank of `sigma_r` for `(n, d, r)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SosStatus sos_dimension(size_t n,
                             size_t d,
                             size_t r,
                             uint32_t p,
                             uint64_t seed,
                             size_t trials,
                             struct SosDimensionReport **out);

/**
 * 1 when the expected dimension is certified, 0 when inconclusive, -1 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int32_t sos_dimension_is_certified(const struct SosDimensionReport *report);

/**
 * # Safety
 * `report` must be null or a live handle; `out` must be writable.
 */
enum SosStatus sos_dimension_observed_rank(const struct SosDimensionReport *report, size_t *out);

/**
 * # Safety
 * `report` must be null or a live handle; `out` must be writable.
 */
enum SosStatus sos_dimension_to_json(const struct SosDimensionReport *report, char **out);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void sos_dimension_free(struct SosDimensionReport *report);

/**
 * Parses `{"n":..,"d":..,"p":..,"terms":[{"exp":[..],"c":..}]}`.
 *
 * # Safety
 * `json` must be null or a nul-terminated string; `out` must be writable.
 */
enum SosStatus sos_poly_from_json(const char *json, struct SosPoly **out);

/**
 * # Safety
 * `poly` must be null or a handle not yet freed.
 */
void sos_poly_free(struct SosPoly *poly);

/**
 * Rank of the middle catalecticant of an even-degree form.
 *
 * # Safety
 * `poly` must be null or a live handle; `out` must be writable.
 */
enum SosStatus sos_middle_cat_rank(const struct SosPoly *poly, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOSIDENT_H */
