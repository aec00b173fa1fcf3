#ifndef AFFINE_CLUSTER_H
#define AFFINE_CLUSTER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum AcStatus {
  AC_STATUS_OK = 0,
  AC_STATUS_NULL_POINTER = 1,
  AC_STATUS_INVALID_ARGUMENT = 2,
  AC_STATUS_NOT_AFFINE = 3,
  AC_STATUS_NOT_ACYCLIC = 4,
  AC_STATUS_IDENTITY_VIOLATED = 5,
  AC_STATUS_NOT_FOUND = 6,
  AC_STATUS_BUDGET_EXCEEDED = 7,
  AC_STATUS_INTERNAL = 8,
  AC_STATUS_PANIC = 9,
} AcStatus;

/**
 * Theta functions, tubes and identity checks for one affine exchange matrix.
 */
typedef struct AcEngine AcEngine;

/**
 * A completed rank-2 scattering diagram.
 */
typedef struct AcScattering AcScattering;

/**
 * A seed with principal coefficients.
 */
typedef struct AcSeed AcSeed;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *ac_last_error(void);

/**
 * Library version as a static string.
 */
const char *ac_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void ac_string_free(char *s);

/**
 * Builds an engine from a row-major `n × n` exchange matrix.
 *
 * # Safety
 * `b` must point to `n * n` readable integers; `out` must be writable.
 */
enum AcStatus ac_engine_new(const int64_t *b, size_t n, struct AcEngine **out);

/**
 * Builds an engine from a bundled matrix such as "A2tilde" or "kronecker".
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum AcStatus ac_engine_from_fixture(const char *name, struct AcEngine **out);

/**
 * # Safety
 * `e` must be NULL or a handle from `ac_engine_new`, not yet freed.
 */
void ac_engine_free(struct AcEngine *e);

/**
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum AcStatus ac_engine_rank(const struct AcEngine *e, size_t *out);

/**
 * Writes δ in simple-root coordinates; `len` must equal the rank.
 *
 * # Safety
 * `e` must be a live handle; `out` must hold `len` integers.
 */
enum AcStatus ac_engine_delta(const struct AcEngine *e, int64_t *out, size_t len);

/**
 * Writes ν_c of a nonnegative root vector.
 *
 * # Safety
 * `e` must be a live handle; `root` and `out` must hold `len` integers.
 */
enum AcStatus ac_engine_nu_c(const struct AcEngine *e,
                             const int64_t *root,
                             int64_t *out,
                             size_t len);

/**
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum AcStatus ac_engine_tube_count(const struct AcEngine *e, size_t *out);

/**
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum AcStatus ac_engine_tube_size(const struct AcEngine *e, size_t tube, size_t *out);

/**
 * Writes orbit element `index` of a tube.
 *
 * # Safety
 * `e` must be a live handle; `out` must hold `len` integers.
 */
enum AcStatus ac_engine_tube_element(const struct AcEngine *e,
                                     size_t tube,
                                     size_t index,
                                     int64_t *out,
                                     size_t len);

/**
 * ϑ of k·ν_c(δ) as text.
 *
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum AcStatus ac_engine_theta_k_delta(const struct AcEngine *e, int64_t k, char **out);

/**
 * ϑ of a weight on the imaginary wall or the g-vector of a cluster
 * variable, as text.
 *
 * # Safety
 * `e` must be a live handle; `label` must hold `len` integers; `out` must
 * be writable.
 */
enum AcStatus ac_engine_theta(const struct AcEngine *e,
                              const int64_t *label,
                              size_t len,
                              char **out);

/**
 * Checks identities by name ("cheby", "imexch", comma-separated, or "all").
 * Returns `AC_STATUS_IDENTITY_VIOLATED` on the first failure.
 *
 * # Safety
 * `e` must be a live handle; `identities` must be a NUL-terminated string;
 * `checked` may be NULL.
 */
enum AcStatus ac_engine_verify(const struct AcEngine *e,
                               const char *identities,
                               uint64_t seed,
                               size_t *checked);

/**
 * Initial seed with principal coefficients for a row-major `n × n`
 * exchange matrix.
 *
 * # Safety
 * `b` must point to `n * n` readable integers; `out` must be writable.
 */
enum AcStatus ac_seed_new(const int64_t *b, size_t n, struct AcSeed **out);

/**
 * # Safety
 * `s` must be NULL or a handle from `ac_seed_new`, not yet freed.
 */
void ac_seed_free(struct AcSeed *s);

/**
 * Mutates the seed in place at index `k`.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum AcStatus ac_seed_mutate(struct AcSeed *s, size_t k);

/**
 * Cluster variable `i` as text.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum AcStatus ac_seed_cluster_variable(const struct AcSeed *s, size_t i, char **out);

/**
 * g-vector of cluster variable `i`.
 *
 * # Safety
 * `s` must be a live handle; `out` must hold `len` integers.
 */
enum AcStatus ac_seed_g_vector(const struct AcSeed *s, size_t i, int64_t *out, size_t len);

/**
 * Completes the rank-2 scattering diagram of a row-major 2 × 2 matrix
 * through ŷ-degree `order`.
 *
 * # Safety
 * `b` must point to 4 readable integers; `out` must be writable.
 */
enum AcStatus ac_scatter2_new(const int64_t *b, size_t order, struct AcScattering **out);

/**
 * # Safety
 * `sc` must be NULL or a handle from `ac_scatter2_new`, not yet freed.
 */
void ac_scatter2_free(struct AcScattering *sc);

/**
 * # Safety
 * `sc` must be a live handle; `out` must be writable.
 */
enum AcStatus ac_scatter2_wall_count(const struct AcScattering *sc, size_t *out);

/**
 * # Safety
 * `sc` must be a live handle; `out` must be writable.
 */
enum AcStatus ac_scatter2_is_consistent(const struct AcScattering *sc, bool *out);

/**
 * Broken-line theta function of `lambda` (2 integers) through ŷ-degree
 * `order`, as text.
 *
 * # Safety
 * `sc` must be a live handle; `lambda` must point to 2 integers; `out` must
 * be writable.
 */
enum AcStatus ac_scatter2_theta(const struct AcScattering *sc,
                                const int64_t *lambda,
                                size_t order,
                                char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AFFINE_CLUSTER_H */
