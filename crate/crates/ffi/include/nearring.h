#ifndef NEARRING_H
#define NEARRING_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NrStatus {
  NR_STATUS_OK = 0,
  NR_STATUS_NULL_POINTER = 1,
  NR_STATUS_INVALID_ARGUMENT = 2,
  NR_STATUS_NOT_PRIME = 3,
  NR_STATUS_PRIME_TOO_SMALL = 4,
  NR_STATUS_UNKNOWN_GROUP = 5,
  NR_STATUS_CAP_EXCEEDED = 6,
  NR_STATUS_IO = 7,
  NR_STATUS_INCONCLUSIVE = 8,
  NR_STATUS_INTERNAL = 9,
} NrStatus;

/**
 * Opaque group handle.
 */
typedef struct NrGroup NrGroup;

/**
 * Opaque nearring handle.
 */
typedef struct NrNearring NrNearring;

typedef struct NrAxiomSummary {
  bool is_nearring;
  bool associativity;
  bool left_distributivity;
  bool left_identity;
  bool right_identity;
  bool zero_symmetric;
  /**
   * Total law instances evaluated.
   */
  uint64_t checks;
} NrAxiomSummary;

typedef struct NrLocality {
  uint64_t unit_count;
  uint64_t non_unit_count;
  bool is_local;
  bool non_units_cyclic;
} NrLocality;

typedef struct NrSearchSummary {
  bool exhaustive;
  uint64_t result_count;
  uint64_t branches_explored;
  uint64_t endomorphisms;
  uint64_t identity_candidates;
} NrSearchSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library.
 */
const char *nr_last_error_message(void);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void nr_string_free(char *s);

/**
 * Builds a named group (`h1`..`h4`, `c16`, `d16`, `qd16`, `q16`,
 * `g81-7`..`g81-10`). `p` is required for `h1`..`h4` and ignored
 * (pass 0) otherwise.
 *
 * # Safety
 * `name` must be a valid C string and `out` a valid pointer.
 */
enum NrStatus nr_group_new(const char *name, uint32_t p, struct NrGroup **out_group);

/**
 * # Safety
 * `g` must be null or a handle from [`nr_group_new`] not yet freed.
 */
void nr_group_free(struct NrGroup *g);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_group_order(const struct NrGroup *g, uint64_t *order);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_group_exponent(const struct NrGroup *g, uint32_t *exponent);

/**
 * Sum of two elements given by canonical index.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_group_add(const struct NrGroup *g, uint32_t a, uint32_t b, uint32_t *sum);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_group_neg(const struct NrGroup *g, uint32_t a, uint32_t *neg);

/**
 * The explicit local nearring on H1(p), p > 3 prime.
 *
 * # Safety
 * `out_nr` must be a valid pointer.
 */
enum NrStatus nr_example_nearring_new(uint32_t p, struct NrNearring **out_nr);

/**
 * # Safety
 * `n` must be null or a live nearring handle.
 */
void nr_nearring_free(struct NrNearring *n);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_nearring_order(const struct NrNearring *n, uint64_t *order);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_nearring_identity(const struct NrNearring *n, uint32_t *identity);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_nearring_add(const struct NrNearring *n, uint32_t a, uint32_t b, uint32_t *sum);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_nearring_mul(const struct NrNearring *n,
                              uint32_t a,
                              uint32_t b,
                              uint32_t *product);

/**
 * Checks the nearring axioms, exhaustively or on `samples` seeded
 * random triples per law.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_nearring_verify(const struct NrNearring *n,
                                 bool exhaustive,
                                 uint64_t samples,
                                 uint64_t seed,
                                 struct NrAxiomSummary *summary);

/**
 * Units and the non-unit set.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_nearring_locality(const struct NrNearring *n, struct NrLocality *locality);

/**
 * Axiom and locality reports as a JSON document. Release with
 * [`nr_string_free`].
 *
 * # Safety
 * Pointers must be valid.
 */
enum NrStatus nr_nearring_report_json(const struct NrNearring *n,
                                      bool exhaustive,
                                      uint64_t samples,
                                      uint64_t seed,
                                      char **json);

/**
 * Searches a named group for local nearrings with identity
 * (`require_local = false` accepts any nearring with identity).
 * `budget_ms = 0` means unlimited. Returns [`NrStatus::Inconclusive`]
 * when the budget ran out; the summary is filled in either way.
 *
 * # Safety
 * `name` must be a valid C string and `summary` a valid pointer.
 */
enum NrStatus nr_search(const char *name,
                        bool require_local,
                        bool allow_large,
                        uint64_t budget_ms,
                        struct NrSearchSummary *summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEARRING_H */
