#ifndef PODLES_H
#define PODLES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum PodlesStatus {
  PODLES_STATUS_OK = 0,
  PODLES_STATUS_NULL_POINTER = 1,
  PODLES_STATUS_INVALID_PARAMETER = 2,
  PODLES_STATUS_PARAMETER_MISMATCH = 3,
  PODLES_STATUS_DEGREE_TOO_LARGE = 4,
  PODLES_STATUS_NOT_PODLES = 5,
  PODLES_STATUS_BRANCH_MISMATCH = 6,
  PODLES_STATUS_INVALID_ARGUMENT = 7,
  PODLES_STATUS_PARSE = 8,
  PODLES_STATUS_PANIC = 9,
  PODLES_STATUS_INTERNAL = 10,
} PodlesStatus;

/**
 * Named elements available from [`podles_element_new`].
 */
typedef enum PodlesGenerator {
  PODLES_GENERATOR_ONE = 0,
  PODLES_GENERATOR_A = 1,
  PODLES_GENERATOR_A_STAR = 2,
  PODLES_GENERATOR_B = 3,
  PODLES_GENERATOR_B_STAR = 4,
  /**
   * `b b*`
   */
  PODLES_GENERATOR_SPHERE_A = 5,
  /**
   * `a b*`
   */
  PODLES_GENERATOR_SPHERE_B = 6,
  /**
   * `b a*`
   */
  PODLES_GENERATOR_SPHERE_B_STAR = 7,
} PodlesGenerator;

typedef enum PodlesPointKind {
  /**
   * `q^(2 power)`, for `q < 1`.
   */
  PODLES_POINT_KIND_POWER = 0,
  /**
   * The point `0`.
   */
  PODLES_POINT_KIND_ZERO = 1,
  /**
   * A real number in `[0, 1]`, for `q = 1`.
   */
  PODLES_POINT_KIND_REAL = 2,
} PodlesPointKind;

/**
 * Element of the coordinate algebra in PBW normal form.
 */
typedef struct PodlesElement PodlesElement;

/**
 * Deformation parameter `q` in `(0, 1]`.
 */
typedef struct PodlesParam PodlesParam;

typedef struct PodlesComplex {
  double re;
  double im;
} PodlesComplex;

/**
 * Point of the spectrum of `A`.
 */
typedef struct PodlesPoint {
  enum PodlesPointKind kind;
  uint32_t power;
  double value;
} PodlesPoint;

/**
 * Lower bound for an operator norm with convergence diagnostics.
 */
typedef struct PodlesNorm {
  double value;
  double last_increment;
  uint32_t degree_used;
  bool converged;
} PodlesNorm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *podles_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *podles_version(void);

/**
 * Creates a parameter for `q` in `(0, 1]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PodlesStatus podles_param_new(double q, struct PodlesParam **out);

/**
 * Releases a parameter. Null is ignored.
 *
 * # Safety
 * `p` must come from [`podles_param_new`] and not be used afterwards.
 */
void podles_param_free(struct PodlesParam *p);

/**
 * The value of `q`, or NaN for a null handle.
 *
 * # Safety
 * `p` must be null or a live parameter handle.
 */
double podles_param_q(const struct PodlesParam *p);

/**
 * Creates one of the named elements.
 *
 * # Safety
 * `p` must be a live parameter handle and `out` valid for writes.
 */
enum PodlesStatus podles_element_new(const struct PodlesParam *p,
                                     enum PodlesGenerator which,
                                     struct PodlesElement **out);

/**
 * Releases an element. Null is ignored.
 *
 * # Safety
 * `x` must come from this library and not be used afterwards.
 */
void podles_element_free(struct PodlesElement *x);

/**
 * `x + y`.
 *
 * # Safety
 * `x`, `y` must be live element handles and `out` valid for writes.
 */
enum PodlesStatus podles_element_add(const struct PodlesElement *x,
                                     const struct PodlesElement *y,
                                     struct PodlesElement **out);

/**
 * `x y`.
 *
 * # Safety
 * `x`, `y` must be live element handles and `out` valid for writes.
 */
enum PodlesStatus podles_element_multiply(const struct PodlesElement *x,
                                          const struct PodlesElement *y,
                                          struct PodlesElement **out);

/**
 * `c x` for a complex scalar `c`.
 *
 * # Safety
 * `x` must be a live element handle and `out` valid for writes.
 */
enum PodlesStatus podles_element_scale(const struct PodlesElement *x,
                                       struct PodlesComplex c,
                                       struct PodlesElement **out);

/**
 * `x*`.
 *
 * # Safety
 * `x` must be a live element handle and `out` valid for writes.
 */
enum PodlesStatus podles_element_adjoint(const struct PodlesElement *x, struct PodlesElement **out);

/**
 * Whether `x` lies in the Podles sphere. False for a null handle.
 *
 * # Safety
 * `x` must be null or a live element handle.
 */
bool podles_element_is_podles(const struct PodlesElement *x);

/**
 * Haar state `h(x)`.
 *
 * # Safety
 * `x` must be a live element handle and `out` valid for writes.
 */
enum PodlesStatus podles_element_haar(const struct PodlesElement *x, struct PodlesComplex *out);

/**
 * JSON form of `x`, released with [`podles_string_free`].
 *
 * # Safety
 * `x` must be a live element handle and `out` valid for writes.
 */
enum PodlesStatus podles_element_to_json(const struct PodlesElement *x, char **out);

/**
 * Parses an element from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writes.
 */
enum PodlesStatus podles_element_from_json(const char *json, struct PodlesElement **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void podles_string_free(char *s);

/**
 * `h_N(x) = <N+1> h(a*^N x a^N)`.
 *
 * # Safety
 * `x` must be a live element handle and `out` valid for writes.
 */
enum PodlesStatus podles_state_hn(uint32_t n,
                                  const struct PodlesElement *x,
                                  struct PodlesComplex *out);

/**
 * Berezin coefficient `B(N, m)`.
 *
 * # Safety
 * `p` must be a live parameter handle and `out` valid for writes.
 */
enum PodlesStatus podles_berezin_coeff(uint32_t n,
                                       uint32_t m,
                                       const struct PodlesParam *p,
                                       double *out);

/**
 * Upper bound for the distance between `h_N` and the counit.
 *
 * # Safety
 * `p` must be a live parameter handle and `out` valid for writes.
 */
enum PodlesStatus podles_dq_upper(uint32_t n, const struct PodlesParam *p, double *out);

/**
 * Spectral metric between two points of the spectrum of `A`.
 *
 * # Safety
 * `p` must be a live parameter handle and `out` valid for writes.
 */
enum PodlesStatus podles_rho_q(struct PodlesPoint x,
                               struct PodlesPoint y,
                               const struct PodlesParam *p,
                               double *out);

/**
 * Operator norm estimate of `x` in the GNS representation of the Haar state.
 *
 * # Safety
 * `x` must be a live element handle and `out` valid for writes.
 */
enum PodlesStatus podles_gns_norm(const struct PodlesElement *x,
                                  uint32_t max_degree,
                                  double stop_tol,
                                  struct PodlesNorm *out);

/**
 * Lip-norm estimate `max(|∂_1 x|, |∂_2 x|)` of a Podles element.
 *
 * # Safety
 * `x` must be a live element handle and `out` valid for writes.
 */
enum PodlesStatus podles_lipnorm(const struct PodlesElement *x,
                                 uint32_t max_degree,
                                 double stop_tol,
                                 struct PodlesNorm *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PODLES_H */
