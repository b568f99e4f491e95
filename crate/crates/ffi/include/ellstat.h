#ifndef ELLSTAT_H
#define ELLSTAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EllstatStatus {
  ELLSTAT_STATUS_OK = 0,
  ELLSTAT_STATUS_NULL_POINTER = 1,
  ELLSTAT_STATUS_INVALID_ARGUMENT = 2,
  ELLSTAT_STATUS_DEGENERATE = 3,
  ELLSTAT_STATUS_NOT_MINIMAL = 4,
  ELLSTAT_STATUS_BAD_AT2_OR3 = 5,
  ELLSTAT_STATUS_BUDGET = 6,
  ELLSTAT_STATUS_INVARIANT = 7,
  ELLSTAT_STATUS_OVERFLOW = 8,
  ELLSTAT_STATUS_BUFFER_TOO_SMALL = 9,
  ELLSTAT_STATUS_PANIC = 10,
} EllstatStatus;

// A finished census.
typedef struct EllstatCensus EllstatCensus;

// A classified curve with good reduction at 2 and 3.
typedef struct EllstatCurve EllstatCurve;

// Plain global invariants. `d` carries the sign of the discriminant.
typedef struct EllstatInvariants {
  int64_t delta;
  int64_t conductor;
  int64_t index;
  int64_t q;
  int64_t d;
  uint32_t bad_primes;
} EllstatInvariants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf`; returns the
// number of bytes the full message needs, including the NUL.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
uintptr_t ellstat_last_error(char *buf, uintptr_t len);

// Classifies `y^2 = x^3 + ax + b`; `*out` receives a handle on success.
//
// # Safety
// `out` must be valid for writes.
enum EllstatStatus ellstat_curve_new(int64_t a, int64_t b, struct EllstatCurve **out);

// # Safety
// `c` must be null or a handle from [`ellstat_curve_new`] not yet freed.
void ellstat_curve_free(struct EllstatCurve *c);

// # Safety
// `c` must be a live handle and `out` valid for writes.
enum EllstatStatus ellstat_curve_invariants(const struct EllstatCurve *c,
                                            struct EllstatInvariants *out);

// Kodaira symbol at a prime `p >= 5`, e.g. `"I1"` or `"IV*"`, written to `buf`.
//
// # Safety
// `c` must be a live handle and `buf` valid for `len` bytes.
enum EllstatStatus ellstat_curve_symbol(const struct EllstatCurve *c,
                                        uint64_t p,
                                        char *buf,
                                        uintptr_t len);

// Density of a reduction type at `p` as `"num/den"`.
//
// # Safety
// `symbol` must be a NUL-terminated string and `buf` valid for `len` bytes.
enum EllstatStatus ellstat_symbol_density(uint64_t p, const char *symbol, char *buf, uintptr_t len);

// Certified enclosure `[lo, hi]` of a named constant (`sf+`, `sf-`, `sf`,
// `kappa+`, `kappa-`, `kappa`, `generic`), rounded outward to doubles.
//
// # Safety
// `name` must be a NUL-terminated string; `lo` and `hi` valid for writes.
enum EllstatStatus ellstat_constant(const char *name, uint64_t p0, double *lo, double *hi);

// Runs a census on the dyadic grid up to `x_max`.
//
// # Safety
// `out` must be valid for writes.
enum EllstatStatus ellstat_census_run(uint64_t x_max,
                                      double kappa,
                                      bool full_tables,
                                      uint64_t index_cap,
                                      struct EllstatCensus **out);

// # Safety
// `c` must be null or a handle from [`ellstat_census_run`] not yet freed.
void ellstat_census_free(struct EllstatCensus *c);

// Number of grid points.
//
// # Safety
// `c` must be a live handle and `out` valid for writes.
enum EllstatStatus ellstat_census_grid_len(const struct EllstatCensus *c, uintptr_t *out);

// Count of `family` (e.g. `"E_sf"`) with conductor below grid point `i`.
//
// # Safety
// `c` must be a live handle, `family` NUL-terminated, `x` and `count` valid for writes.
enum EllstatStatus ellstat_census_count(const struct EllstatCensus *c,
                                        const char *family,
                                        uintptr_t i,
                                        uint64_t *x,
                                        uint64_t *count);

// The full report as JSON.
//
// # Safety
// `c` must be a live handle and `buf` valid for `len` bytes.
enum EllstatStatus ellstat_census_json(const struct EllstatCensus *c, char *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ELLSTAT_H */
