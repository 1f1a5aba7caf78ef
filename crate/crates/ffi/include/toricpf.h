/* Generated by cbindgen. Do not edit. */

#ifndef TORICPF_H
#define TORICPF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Positivity of a divisor.
typedef enum TpfPositivity {
  TPF_POSITIVITY_AMPLE = 0,
  TPF_POSITIVITY_NEF_NOT_AMPLE = 1,
  TPF_POSITIVITY_NOT_NEF = 2,
} TpfPositivity;

// Result of every fallible call.
typedef enum TpfStatus {
  TPF_STATUS_OK = 0,
  // A required pointer argument was null.
  TPF_STATUS_NULL_POINTER = 1,
  // Input text or arrays could not be read.
  TPF_STATUS_PARSE = 2,
  // Input was well formed but mathematically rejected.
  TPF_STATUS_INVALID = 3,
  // An output buffer was shorter than required.
  TPF_STATUS_BUFFER_TOO_SMALL = 4,
  // A result does not fit in 64 bits.
  TPF_STATUS_OVERFLOW = 5,
  // Internal failure; the library caught a panic.
  TPF_STATUS_PANIC = 6,
} TpfStatus;

// A push-forward decomposition.
typedef struct TpfDecomposition TpfDecomposition;

// A toric endomorphism of a fan.
typedef struct TpfEndo TpfEndo;

// A validated fan together with its Picard lattice.
typedef struct TpfFan TpfFan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or an empty string.
// The pointer stays valid until the next library call on the same thread.
const char *tpf_last_error(void);

// Parses a fan from a JSON document.
enum TpfStatus tpf_fan_parse(const char *json, struct TpfFan **out_fan);

// Builds a named standard fan such as `P2`, `F1` or `P1xP1`.
enum TpfStatus tpf_fan_standard(const char *name, struct TpfFan **out_fan);

// Releases a fan. Null is ignored.
void tpf_fan_free(struct TpfFan *fan);

enum TpfStatus tpf_fan_dim(const struct TpfFan *fan, size_t *out_dim);

enum TpfStatus tpf_fan_num_rays(const struct TpfFan *fan, size_t *out_n);

// Copies the rays row-major into `buf`, which must hold `num_rays * dim` entries.
enum TpfStatus tpf_fan_rays(const struct TpfFan *fan, int64_t *buf, size_t len);

enum TpfStatus tpf_fan_pic_rank(const struct TpfFan *fan, size_t *out_rank);

// Reports smoothness and completeness.
enum TpfStatus tpf_fan_report(const struct TpfFan *fan, bool *out_smooth, bool *out_complete);

// Writes the Picard class of a divisor into `buf` (length at least the Picard rank).
enum TpfStatus tpf_class_of(const struct TpfFan *fan,
                            const int64_t *coeffs,
                            size_t len,
                            int64_t *buf,
                            size_t buf_len);

// Dimension of the space of global sections of O(D).
enum TpfStatus tpf_h0(const struct TpfFan *fan,
                      const int64_t *coeffs,
                      size_t len,
                      uint64_t *out_h0);

enum TpfStatus tpf_positivity(const struct TpfFan *fan,
                              const int64_t *coeffs,
                              size_t len,
                              enum TpfPositivity *out_pos);

// Multiplication by `q` on the lattice.
enum TpfStatus tpf_endo_mul(const struct TpfFan *fan, int64_t q, struct TpfEndo **out_endo);

// Endomorphism from a `dim x dim` row-major integer matrix.
enum TpfStatus tpf_endo_new(const struct TpfFan *fan,
                            const int64_t *matrix,
                            size_t len,
                            struct TpfEndo **out_endo);

void tpf_endo_free(struct TpfEndo *endo);

enum TpfStatus tpf_endo_degree(const struct TpfEndo *endo, int64_t *out_deg);

// Decides int-amplification. When the answer is yes the certificate class is
// written to `cert` (length at least the Picard rank).
enum TpfStatus tpf_intamp(const struct TpfEndo *endo,
                          bool *out_yes,
                          int64_t *cert,
                          size_t cert_len);

// Decomposes the push-forward of O(D).
enum TpfStatus tpf_pushforward(const struct TpfEndo *endo,
                               const int64_t *coeffs,
                               size_t len,
                               struct TpfDecomposition **out_dec);

void tpf_decomposition_free(struct TpfDecomposition *dec);

enum TpfStatus tpf_decomposition_len(const struct TpfDecomposition *dec, size_t *out_len);

// Copies the class of summand `index` into `buf`.
enum TpfStatus tpf_decomposition_class(const struct TpfDecomposition *dec,
                                       size_t index,
                                       int64_t *buf,
                                       size_t len);

// Decomposes and checks the result on every twist in the box `[-bound, bound]^r`.
enum TpfStatus tpf_verify(const struct TpfEndo *endo,
                          const int64_t *coeffs,
                          size_t len,
                          uint32_t bound,
                          bool *out_passed);

// Contracting exponent of the induced Cox ring map, or -1 when there is none.
enum TpfStatus tpf_contracting(const struct TpfEndo *endo, int64_t *out_exp);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORICPF_H */
