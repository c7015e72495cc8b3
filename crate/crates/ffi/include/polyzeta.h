#ifndef POLYZETA_H
#define POLYZETA_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum PzStatus {
  PZ_STATUS_OK = 0,
  PZ_STATUS_INVALID_PARAMETER = 1,
  PZ_STATUS_DOMAIN_VIOLATION = 2,
  PZ_STATUS_TOLERANCE_UNACHIEVABLE = 3,
  PZ_STATUS_NON_CONVERGENCE = 4,
  PZ_STATUS_UNSUPPORTED_DIMENSION = 5,
  PZ_STATUS_NON_FINITE = 6,
  PZ_STATUS_ROOT_SEARCH = 7,
  PZ_STATUS_NULL_POINTER = 8,
  PZ_STATUS_BUFFER_TOO_SMALL = 9,
  PZ_STATUS_PANIC = 10,
} PzStatus;

typedef enum PzMethod {
  PZ_METHOD_SERIES = 0,
  PZ_METHOD_DIRECT_QUAD = 1,
  PZ_METHOD_POLYTOPE_FORMULA = 2,
  PZ_METHOD_MONTE_CARLO = 3,
} PzMethod;

typedef enum PzDist {
  PZ_DIST_XI = 0,
  PZ_DIST_THETA = 1,
} PzDist;

// Opaque result of the polytope formula, with per-tuple terms.
typedef struct PzBreakdown PzBreakdown;

typedef struct PzResult {
  double value;
  double error_estimate;
  uint64_t work;
  enum PzMethod method;
} PzResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty after success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *pz_last_error(void);

// Static name of a status code.
const char *pz_status_name(enum PzStatus status);

// S(k,a) by the accelerated two-sided series.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_series(uint32_t k, uint32_t a, double tol, struct PzResult *out);

// S(k,a) as the unit-cube integral, `k <= 3`.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_direct_quad(uint32_t k, uint32_t a, double tol, struct PzResult *out);

// S(k,a) by the polytope formula, `k <= 6`. On success `*out` owns a handle
// that must be released with [`pz_breakdown_free`]. `printed_constant`
// selects the diagnostic constant `(π/a)sin(π/a)`.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_formula(uint32_t k,
                         uint32_t a,
                         double tol,
                         bool printed_constant,
                         struct PzBreakdown **out);

// Release a handle from [`pz_formula`]. Null is ignored.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
void pz_breakdown_free(struct PzBreakdown *handle);

// Assembled value of a breakdown.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_breakdown_result(const struct PzBreakdown *handle, struct PzResult *out);

// `ψ(1)^k`, `φ(1)^k` and the total probability.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_breakdown_probabilities(const struct PzBreakdown *handle,
                                         double *easy_xi,
                                         double *easy_theta,
                                         double *total);

// Number of admissible tuples in a breakdown; 0 for a null handle.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
size_t pz_breakdown_len(const struct PzBreakdown *handle);

// Tuple `index`: writes its length to `*len` and, when `capacity` allows,
// its 1-based indices and exponents into the two buffers. Passing
// `capacity = 0` with null buffers queries the length.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_breakdown_tuple(const struct PzBreakdown *handle,
                                 size_t index,
                                 uint32_t *indices,
                                 uint32_t *alphas,
                                 size_t capacity,
                                 size_t *len);

// `J` and `K` for tuple `index`.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_breakdown_terms(const struct PzBreakdown *handle,
                                 size_t index,
                                 double *j,
                                 double *k);

// S(k,a) by Monte Carlo with `samples` trials per probability.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_monte_carlo(uint32_t k,
                             uint32_t a,
                             uint64_t seed,
                             uint64_t samples,
                             struct PzResult *out);

// ψ(t) for `PZ_DIST_XI`, φ(t) for `PZ_DIST_THETA`.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_cdf(uint32_t a, enum PzDist dist, double t, double *out);

// ψ⁻¹(u) for `u` in (0, 1).
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_inverse_cdf_xi(uint32_t a, double u, double *out);

// Fill `buffer[0..n]` with the seeded sample stream of Ξ or Θ.
//
// # Safety
// Pointer arguments must be null or valid for the reads and writes described above.
enum PzStatus pz_sample(uint32_t a, enum PzDist dist, uint64_t seed, double *buffer, size_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYZETA_H */
