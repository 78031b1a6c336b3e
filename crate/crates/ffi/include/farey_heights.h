#ifndef FAREY_HEIGHTS_H
#define FAREY_HEIGHTS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum FhStatus {
  FH_STATUS_OK = 0,
  /**
   * A precondition failed: zero center, non-prime place, index out of range.
   */
  FH_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed rational, tower spec or config text.
   */
  FH_STATUS_PARSE_ERROR = 2,
  /**
   * The quantity is undefined there, e.g. a point on the boundary divisor.
   */
  FH_STATUS_UNDEFINED = 3,
  FH_STATUS_FACTOR_EFFORT = 4,
  /**
   * An exact sign could not be certified.
   */
  FH_STATUS_INCONCLUSIVE = 5,
  FH_STATUS_NULL_POINTER = 6,
  /**
   * A panic or I/O failure inside the library.
   */
  FH_STATUS_INTERNAL = 7,
} FhStatus;

/**
 * A tower of blowups over one center.
 */
typedef struct FhTower FhTower;

/**
 * One exceptional divisor. `den` is 0 for the fraction `1/0`.
 */
typedef struct FhNode {
  size_t index;
  uint64_t num;
  uint64_t den;
  uint64_t mult_pullback;
  uint64_t discrepancy;
} FhNode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *fh_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fh_string_free(char *s);

/**
 * Builds a tower from a spec (`chain:N`, `t2:N` or `custom:P1,P2,...`) over
 * `center`.
 *
 * # Safety
 * String arguments must be nul-terminated; `out` must be writable.
 */
enum FhStatus fh_tower_new(const char *spec, const char *center, struct FhTower **out);

/**
 * The chain tower with `n` blowups.
 *
 * # Safety
 * As for [`fh_tower_new`].
 */
enum FhStatus fh_tower_chain(size_t n, const char *center, struct FhTower **out);

/**
 * The tower `X_n` of blowups at the ends of the intervals `I_n`.
 *
 * # Safety
 * As for [`fh_tower_new`].
 */
enum FhStatus fh_tower_theorem2(size_t n, const char *center, struct FhTower **out);

/**
 * # Safety
 * `t` must come from a tower constructor and not have been freed. Null is
 * ignored.
 */
void fh_tower_free(struct FhTower *t);

/**
 * Number of exceptional divisors.
 *
 * # Safety
 * `t` must be a live tower; `out` writable.
 */
enum FhStatus fh_tower_len(const struct FhTower *t, size_t *out);

/**
 * The divisor `E(index)`, `index` counted from 1.
 *
 * # Safety
 * `t` must be a live tower; `out` writable.
 */
enum FhStatus fh_tower_node(const struct FhTower *t, size_t index, struct FhNode *out);

/**
 * The spec string that rebuilds this tower.
 *
 * # Safety
 * `t` must be a live tower; `out` writable.
 */
enum FhStatus fh_tower_spec(const struct FhTower *t, char **out);

/**
 * Whether the boundary divisor is reduced and the discrepancies match the
 * canonical-divisor expansion. `pullback` (optional) receives the pullback
 * of `XYZ = 0` as text.
 *
 * # Safety
 * `t` must be a live tower; the flags writable; `pullback` writable or null.
 */
enum FhStatus fh_tower_bookkeeping(const struct FhTower *t,
                                   bool *reduced,
                                   bool *canonical_ok,
                                   char **pullback);

/**
 * Local height of `E(index)` at `[a : b : 1]` and the place `place` (`inf`
 * or a prime), as a log.
 *
 * # Safety
 * `t` must be a live tower; strings nul-terminated; `out` writable.
 */
enum FhStatus fh_local_contrib(const struct FhTower *t,
                               size_t index,
                               const char *a,
                               const char *b,
                               const char *place,
                               char **out);

/**
 * The per-prime bound at `[a : b : 1]` and the prime `p`. `ok` tells
 * whether it holds; the orders and both sides are optional outputs.
 *
 * # Safety
 * `t` must be a live tower; strings nul-terminated; `ok` writable; the other
 * outputs writable or null.
 */
enum FhStatus fh_per_prime_bound(const struct FhTower *t,
                                 const char *a,
                                 const char *b,
                                 const char *p,
                                 bool *ok,
                                 int64_t *n_p,
                                 int64_t *m_p,
                                 char **lhs,
                                 char **bound);

/**
 * `phi_alpha(x)` for `x` in the closed interval `I_alpha`.
 *
 * # Safety
 * Strings nul-terminated; `out` writable.
 */
enum FhStatus fh_phi(const char *alpha, const char *x, char **out);

/**
 * The level-`level` Farey interval containing `x`, as `(a/b, c/d)`.
 *
 * # Safety
 * `x` nul-terminated; `out` writable.
 */
enum FhStatus fh_farey_interval(const char *x, uint64_t level, char **out);

/**
 * The Stern-Brocot level at which `x` first appears.
 *
 * # Safety
 * `x` nul-terminated; `out` writable.
 */
enum FhStatus fh_first_level(const char *x, uint64_t *out);

/**
 * The height `h(x)` as a log.
 *
 * # Safety
 * `x` nul-terminated; `out` writable.
 */
enum FhStatus fh_height(const char *x, char **out);

/**
 * Runs a Vojta scan described by `key = value` config text (the scan keys
 * of the CLI) and returns the summary JSON without a timestamp.
 * `violations` (optional) receives the number of per-prime violations.
 *
 * # Safety
 * `config` nul-terminated; `out` writable; `violations` writable or null.
 */
enum FhStatus fh_scan_vojta(const char *config, char **out, uint64_t *violations);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAREY_HEIGHTS_H */
