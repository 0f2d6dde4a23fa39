#ifndef SPINVQE_H
#define SPINVQE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SVQ_STATUS_OK = 0,
  SVQ_STATUS_NULL_POINTER = 1,
  SVQ_STATUS_INVALID_ARGUMENT = 2,
  SVQ_STATUS_UNSUPPORTED = 3,
  SVQ_STATUS_ABORTED = 4,
  SVQ_STATUS_INTERNAL = 5,
  SVQ_STATUS_PANIC = 6,
} SvqStatus;

/**
 * Lattice Hamiltonian.
 */
typedef struct SvqHamiltonian SvqHamiltonian;

/**
 * Lattice, Hamiltonian and compiled ansatz circuit built from a run config.
 */
typedef struct SvqProblem SvqProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *svq_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *svq_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void svq_string_free(char *s);

/**
 * Builds a Heisenberg Hamiltonian. `kind` is chain, ring, ladder, square or
 * triangular; `boundary` is open, periodic or null for the kind's default.
 * `random_couplings` nonzero draws couplings from `seed`.
 *
 * # Safety
 * `kind` and a non-null `boundary` must be nul-terminated strings, `dims`
 * must point to `ndims` values and `out` must be writable.
 */
SvqStatus svq_hamiltonian_new(const char *kind,
                              const size_t *dims,
                              size_t ndims,
                              const char *boundary,
                              int32_t random_couplings,
                              uint64_t seed,
                              SvqHamiltonian **out);

/**
 * # Safety
 * `h` must be null or a handle from `svq_hamiltonian_new`, freed at most once.
 */
void svq_hamiltonian_free(SvqHamiltonian *h);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
SvqStatus svq_hamiltonian_nqubits(const SvqHamiltonian *h, size_t *out);

/**
 * Canonical JSON document for the Hamiltonian.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
SvqStatus svq_hamiltonian_to_json(const SvqHamiltonian *h, char **out);

/**
 * Lanczos ground-state energy; `tol <= 0` selects the default tolerance.
 *
 * # Safety
 * `h` must be a live handle and `energy` writable.
 */
SvqStatus svq_exact_ground_energy(const SvqHamiltonian *h, double tol, double *energy);

/**
 * Builds a problem from a TOML run configuration.
 *
 * # Safety
 * `config_toml` must be a nul-terminated string and `out` writable.
 */
SvqStatus svq_problem_new(const char *config_toml, SvqProblem **out);

/**
 * # Safety
 * `p` must be null or a handle from `svq_problem_new`, freed at most once.
 */
void svq_problem_free(SvqProblem *p);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
SvqStatus svq_problem_parameter_count(const SvqProblem *p, size_t *out);

/**
 * Energy at `params`. `eval_index` selects the sampling stream when the
 * configured estimator is sampled and is ignored otherwise.
 *
 * # Safety
 * `p` must be a live handle, `params` must point to `len` values and
 * `energy` must be writable.
 */
SvqStatus svq_problem_energy(const SvqProblem *p,
                             const double *params,
                             size_t len,
                             uint64_t eval_index,
                             double *energy);

/**
 * Runs the configured optimization and returns the summary JSON and the
 * trace CSV. Either output pointer may be null when not wanted.
 *
 * # Safety
 * `config_toml` must be a nul-terminated string; non-null outputs must be writable.
 */
SvqStatus svq_run_vqe(const char *config_toml, char **summary_json, char **trace_csv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINVQE_H */
