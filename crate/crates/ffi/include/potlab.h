#ifndef POTLAB_H
#define POTLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PotlabStatus {
  POTLAB_STATUS_OK = 0,
  POTLAB_STATUS_INVALID_INPUT = 1,
  POTLAB_STATUS_NUMERICAL = 2,
  POTLAB_STATUS_NULL_POINTER = 3,
  POTLAB_STATUS_BUFFER_TOO_SMALL = 4,
  POTLAB_STATUS_PANIC = 5,
} PotlabStatus;

/*
 A finite-gap set.
 */
typedef struct PotlabGapSet PotlabGapSet;

/*
 A solved Green's function.
 */
typedef struct PotlabGreen PotlabGreen;

/*
 Jacobi coefficients with their tail.
 */
typedef struct PotlabJacobi PotlabJacobi;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Length of the last error message on this thread, without the terminator.
 Copies at most `cap - 1` bytes plus a NUL into `buf` when `buf` is not null.

 # Safety
 `buf` must be null or valid for `cap` bytes.
 */
uintptr_t potlab_last_error(char *buf, uintptr_t cap);

/*
 `[alpha, beta]` minus `gap_count` gaps given as `(lo, hi)` pairs in `gaps`.

 # Safety
 `gaps` must hold `2 * gap_count` values; `out` must be valid for writes.
 */
enum PotlabStatus potlab_gapset_new(double alpha,
                                    double beta,
                                    const double *gaps,
                                    uintptr_t gap_count,
                                    struct PotlabGapSet **out);

/*
 The fat Cantor set of the given level on `[0, 1]`.

 # Safety
 `out` must be valid for writes.
 */
enum PotlabStatus potlab_gapset_fat_cantor(uint32_t level, struct PotlabGapSet **out);

/*
 # Safety
 `set` must be null or a handle from this library, not yet freed.
 */
void potlab_gapset_free(struct PotlabGapSet *set);

/*
 # Safety
 `set` must be a live handle.
 */
uintptr_t potlab_gapset_gap_count(const struct PotlabGapSet *set);

/*
 Solves for the Green's function; `quad_order == 0` picks the default.

 # Safety
 `set` must be a live handle and `out` valid for writes.
 */
enum PotlabStatus potlab_green_solve(const struct PotlabGapSet *set,
                                     uintptr_t quad_order,
                                     struct PotlabGreen **out);

/*
 # Safety
 `green` must be null or a handle from this library, not yet freed.
 */
void potlab_green_free(struct PotlabGreen *green);

/*
 # Safety
 `green` must be a live handle and `out` valid for writes.
 */
enum PotlabStatus potlab_green_capacity(const struct PotlabGreen *green, double *out);

/*
 # Safety
 `green` must be a live handle and `out` valid for writes.
 */
enum PotlabStatus potlab_green_pw_sum(const struct PotlabGreen *green, double *out);

/*
 `g(x)`; zero on the set.

 # Safety
 `green` must be a live handle and `out` valid for writes.
 */
enum PotlabStatus potlab_green_value(const struct PotlabGreen *green, double x, double *out);

/*
 `g'(x)` off the set.

 # Safety
 `green` must be a live handle and `out` valid for writes.
 */
enum PotlabStatus potlab_green_derivative(const struct PotlabGreen *green, double x, double *out);

/*
 Critical points, one per gap, into `buf`.

 # Safety
 `buf` must be valid for `cap` writes, `count` for one.
 */
enum PotlabStatus potlab_green_critical_points(const struct PotlabGreen *green,
                                               double *buf,
                                               uintptr_t cap,
                                               uintptr_t *count);

/*
 Finite Jacobi matrix from `a` (length `n - 1`) and `b` (length `n`).

 # Safety
 `a` and `b` must hold `a_len` and `b_len` values.
 */
enum PotlabStatus potlab_jacobi_new(const double *a,
                                    uintptr_t a_len,
                                    const double *b,
                                    uintptr_t b_len,
                                    struct PotlabJacobi **out);

/*
 At least `n` coefficients of the equilibrium measure of the solved set.

 # Safety
 `green` must be a live handle and `out` valid for writes.
 */
enum PotlabStatus potlab_jacobi_equilibrium(const struct PotlabGreen *green,
                                            uintptr_t n,
                                            struct PotlabJacobi **out);

/*
 Coefficients from JSON `{"a": [...], "b": [...], "tail": {...}}`.

 # Safety
 `json` must be a NUL-terminated string and `out` valid for writes.
 */
enum PotlabStatus potlab_jacobi_from_json(const char *json, struct PotlabJacobi **out);

/*
 # Safety
 `jacobi` must be null or a handle from this library, not yet freed.
 */
void potlab_jacobi_free(struct PotlabJacobi *jacobi);

/*
 `a_k`, `b_k` for `k = 1..=n` (tail included) into `a_buf`, `b_buf`.

 # Safety
 Both buffers must be valid for `n` writes.
 */
enum PotlabStatus potlab_jacobi_coefficients(const struct PotlabJacobi *jacobi,
                                             uintptr_t n,
                                             double *a_buf,
                                             double *b_buf);

/*
 Eigenvalues of the `n x n` truncation lying off the set.

 # Safety
 `buf` must be valid for `cap` writes, `count` for one.
 */
enum PotlabStatus potlab_jacobi_gap_eigenvalues(const struct PotlabJacobi *jacobi,
                                                const struct PotlabGreen *green,
                                                uintptr_t n,
                                                double *buf,
                                                uintptr_t cap,
                                                uintptr_t *count);

/*
 The `n`-step sum rule for `jacobi` whose spectral measure is given as JSON
 (`NULL` for the equilibrium measure). Writes both sides.

 # Safety
 Handles must be live; `measure_json` null or NUL-terminated; outputs valid.
 */
enum PotlabStatus potlab_sum_rule(const struct PotlabJacobi *jacobi,
                                  const struct PotlabGreen *green,
                                  const char *measure_json,
                                  uintptr_t n,
                                  double *lhs,
                                  double *rhs);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POTLAB_H */
