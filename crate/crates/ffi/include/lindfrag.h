#ifndef LINDFRAG_H
#define LINDFRAG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every `lf_*` call.
typedef enum LfStatus {
  LF_STATUS_OK = 0,
  LF_STATUS_NULL_POINTER = 1,
  LF_STATUS_INVALID_ARGUMENT = 2,
  LF_STATUS_VALIDATION = 3,
  LF_STATUS_NUMERICAL = 4,
  LF_STATUS_BUFFER_TOO_SMALL = 5,
  LF_STATUS_PANIC = 6,
} LfStatus;

// A validated model together with its stabilizer-basis form.
typedef struct LfModel LfModel;

typedef struct LfComplex {
  double re;
  double im;
} LfComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *lf_version(void);

// Failure message of the most recent call on this thread, empty if it
// succeeded. The pointer stays valid until the next `lf_*` call on the thread.
const char *lf_last_error_message(void);

// Builds a named builtin model (`cluster_y` or `cluster_ziz`) on `n` qubits.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a writable pointer.
enum LfStatus lf_model_builtin(const char *name,
                               size_t n,
                               double j,
                               double kappa,
                               struct LfModel **out);

// Parses a model from its JSON description.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum LfStatus lf_model_from_json(const char *json, struct LfModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must come from `lf_model_builtin` or `lf_model_from_json` and
// must not be used afterwards.
void lf_model_free(struct LfModel *model);

// # Safety
// `model` must be a live handle and `out` a writable pointer.
enum LfStatus lf_model_n_qubits(const struct LfModel *model, size_t *out);

// Number of fragments with `k` active sites, written to `counts[k]` for
// `k = 0..=n_qubits`.
//
// # Safety
// `model` must be a live handle, `counts` must hold `len` entries and
// `out_len` must be writable.
enum LfStatus lf_fragment_histogram(const struct LfModel *model,
                                    uint64_t *counts,
                                    size_t len,
                                    size_t *out_len);

// Total number of fragments.
//
// # Safety
// `model` must be a live handle and `out` a writable pointer.
enum LfStatus lf_fragment_count(const struct LfModel *model, uint64_t *out);

// Exact open-chain modes of the non-Hermitian Ising chain with `n_sites`
// sites. Writes one momentum and one energy per mode.
//
// # Safety
// `momenta` and `energies` must each hold `len` entries and `out_len` must
// be writable.
enum LfStatus lf_tfim_modes(size_t n_sites,
                            double j,
                            double kappa,
                            bool edge_left,
                            bool edge_right,
                            struct LfComplex *momenta,
                            struct LfComplex *energies,
                            size_t len,
                            size_t *out_len);

// Eigenvalues of one pseudo-Hermitian random matrix of size `n`.
//
// # Safety
// `eigenvalues` must hold `len` entries and `out_len` must be writable.
enum LfStatus lf_rmt_eigenvalues(size_t n,
                                 double chi,
                                 uint64_t seed,
                                 struct LfComplex *eigenvalues,
                                 size_t len,
                                 size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINDFRAG_H */
