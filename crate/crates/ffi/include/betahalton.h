#ifndef BETAHALTON_H
#define BETAHALTON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every call.
 */
typedef enum BhStatus {
  BH_STATUS_OK = 0,
  BH_STATUS_INVALID_ARGUMENT = 1,
  BH_STATUS_OUT_OF_RANGE = 2,
  BH_STATUS_OVERFLOW = 3,
  BH_STATUS_INADMISSIBLE = 4,
  BH_STATUS_NON_CONVERGENCE = 5,
  BH_STATUS_EMPTY_INPUT = 6,
  BH_STATUS_POINT_OUT_OF_RANGE = 7,
  BH_STATUS_BUDGET_EXCEEDED = 8,
  BH_STATUS_NULL_POINTER = 9,
  BH_STATUS_BUFFER_TOO_SMALL = 10,
  BH_STATUS_INTERNAL = 11,
} BhStatus;

/*
 Opaque Halton sequence configuration.
 */
typedef struct BhHalton BhHalton;

/*
 Opaque m-bonacci numeration system.
 */
typedef struct BhSystem BhSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates a system of order `m` covering `0 <= n <= max_n`.

 # Safety
 `out` must be valid for a pointer write.
 */
enum BhStatus bh_system_new(size_t m, uint64_t max_n, struct BhSystem **out);

/*
 Releases a system; null is ignored.

 # Safety
 `sys` must come from [`bh_system_new`] and not be used afterwards.
 */
void bh_system_free(struct BhSystem *sys);

/*
 Largest `n` the system can expand.

 # Safety
 `sys` must be a live handle and `out` valid for writes.
 */
enum BhStatus bh_system_max_n(const struct BhSystem *sys, uint64_t *out);

/*
 Dominant root of `x^m - x^{m-1} - ... - 1`.

 # Safety
 `out` must be valid for writes.
 */
enum BhStatus bh_dominant_root(size_t m, double *out);

/*
 Greedy digits of `n`, least significant first, into `digits[0..cap]`.

 `len` receives the digit count. When `cap` is too small nothing is
 copied, `len` still receives the required size and
 `BufferTooSmall` is returned.

 # Safety
 `sys` must be live, `digits` valid for `cap` writes, `len` valid for a write.
 */
enum BhStatus bh_encode(const struct BhSystem *sys,
                        uint64_t n,
                        uint8_t *digits,
                        size_t cap,
                        size_t *len);

/*
 Value of a digit string, least significant first.

 # Safety
 `sys` must be live, `digits` valid for `len` reads, `out` valid for a write.
 */
enum BhStatus bh_decode(const struct BhSystem *sys,
                        const uint8_t *digits,
                        size_t len,
                        uint64_t *out);

/*
 Van der Corput value of `n`.

 # Safety
 `sys` must be live and `out` valid for a write.
 */
enum BhStatus bh_vdc(const struct BhSystem *sys, uint64_t n, double *out);

/*
 Halton configuration for `dims` pairwise distinct orders, covering `n <= max_n`.

 # Safety
 `ms` must be valid for `dims` reads and `out` for a pointer write.
 */
enum BhStatus bh_halton_new(const size_t *ms, size_t dims, uint64_t max_n, struct BhHalton **out);

/*
 Releases a Halton handle; null is ignored.

 # Safety
 `h` must come from [`bh_halton_new`] and not be used afterwards.
 */
void bh_halton_free(struct BhHalton *h);

/*
 Number of coordinates of a Halton point.

 # Safety
 `h` must be live and `out` valid for a write.
 */
enum BhStatus bh_halton_dims(const struct BhHalton *h, size_t *out);

/*
 Writes Halton point `n` into `point[0..cap]`; `cap` must be at least the dimension.

 # Safety
 `h` must be live and `point` valid for `cap` writes.
 */
enum BhStatus bh_halton_point(const struct BhHalton *h, uint64_t n, double *point, size_t cap);

/*
 Exact star discrepancy of `n` values in `[0, 1)`.

 # Safety
 `points` must be valid for `n` reads and `out` for a write.
 */
enum BhStatus bh_star_disc_1d(const double *points, size_t n, double *out);

/*
 Exact star discrepancy of `n` points of dimension `s >= 2`, stored row-major.

 # Safety
 `points` must be valid for `n * s` reads and `out` for a write.
 */
enum BhStatus bh_star_disc_multi(const double *points, size_t n, size_t s, double *out);

/*
 Decay exponent `max(d_i - (m_i - 1)) / sum(m_i - 1)`.

 # Safety
 `ms` and `dims` must be valid for `len` reads and `out` for a write.
 */
enum BhStatus bh_theorem_exponent(const size_t *ms, const double *dims, size_t len, double *out);

/*
 Copies the calling thread's last error message, NUL-terminated and
 truncated to fit `cap` bytes. Returns the full message length without
 the terminator; an empty message means the last call succeeded.

 # Safety
 `buf` must be valid for `cap` writes, or null with `cap == 0`.
 */
size_t bh_last_error_message(char *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BETAHALTON_H */
