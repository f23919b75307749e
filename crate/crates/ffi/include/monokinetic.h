#ifndef MONOKINETIC_H
#define MONOKINETIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MkStatus {
  MK_STATUS_OK = 0,
  MK_STATUS_NULL_POINTER = 1,
  MK_STATUS_INVALID_ARGUMENT = 2,
  MK_STATUS_PARSE = 3,
  MK_STATUS_IO = 4,
  MK_STATUS_NUMERICAL = 5,
  // The query point lies on the caustic; the density is undefined there.
  MK_STATUS_CAUSTIC = 6,
  MK_STATUS_BUFFER_TOO_SMALL = 7,
  MK_STATUS_PANIC = 8,
} MkStatus;

// System, profile and initial measure built from a scenario.
typedef struct MkModel MkModel;

// A validated scenario.
typedef struct MkScenario MkScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `cap`) and returns the full length including the terminator.
//
// # Safety
// `buf` must be null or valid for `cap` bytes.
size_t mk_last_error(char *buf, size_t cap);

// Library version as a static NUL-terminated string.
const char *mk_version(void);

// Parses and validates scenario JSON.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum MkStatus mk_scenario_from_json(const char *json, struct MkScenario **out);

// Looks up a built-in scenario by name.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum MkStatus mk_scenario_builtin(const char *name, struct MkScenario **out);

// Replaces the truncation depth of Cantor-type profiles.
//
// # Safety
// `sc` must be null or a live handle.
enum MkStatus mk_scenario_set_depth(struct MkScenario *sc, uint32_t depth);

// Runs the scenario and writes its artifacts and manifest into `out_dir`.
//
// # Safety
// `sc` must be a live handle and `out_dir` a NUL-terminated path.
enum MkStatus mk_scenario_run(const struct MkScenario *sc, const char *out_dir);

// # Safety
// `sc` must be null or a handle not yet freed.
void mk_scenario_free(struct MkScenario *sc);

// Builds the model objects of a scenario.
//
// # Safety
// `sc` must be a live handle and `out` a valid pointer.
enum MkStatus mk_model_new(const struct MkScenario *sc, struct MkModel **out);

// # Safety
// `m` must be null or a handle not yet freed.
void mk_model_free(struct MkModel *m);

// Number of preimages of x under the time-t fold map within the support of
// the initial density, and whether x is a caustic point.
//
// # Safety
// `m` must be a live handle; `count` and `caustic` valid pointers.
enum MkStatus mk_model_fold_count(const struct MkModel *m,
                                  double t,
                                  double x,
                                  size_t *count,
                                  bool *caustic);

// Fold-sum density Σ_j ρ^in(y_j)/J_t(y_j); [`MkStatus::Caustic`] on the caustic.
//
// # Safety
// `m` must be a live handle and `value` a valid pointer.
enum MkStatus mk_model_density_at(const struct MkModel *m, double t, double x, double *value);

// Histogram of the transported measure: `bins` bin masses written to `total`
// over the window returned in `window_lo`/`window_hi`.
//
// # Safety
// `m` must be a live handle, `total` valid for `bins` doubles, the window
// pointers valid.
enum MkStatus mk_model_histogram(const struct MkModel *m,
                                 double t,
                                 size_t bins,
                                 double *total,
                                 double *window_lo,
                                 double *window_hi);

// Atoms of the transported measure at the candidate points. Up to `cap`
// locations and masses are written; `found` receives the total number, and
// [`MkStatus::BufferTooSmall`] is returned when it exceeds `cap`.
//
// # Safety
// `m` must be a live handle, `candidates` valid for `n` doubles, `xs` and
// `masses` valid for `cap` doubles and `found` a valid pointer.
enum MkStatus mk_model_atoms(const struct MkModel *m,
                             double t,
                             const double *candidates,
                             size_t n,
                             double *xs,
                             double *masses,
                             size_t cap,
                             size_t *found);

// Runs the acceptance criteria listed in `ids` (all twelve when `n` is 0) and
// writes one pass flag per criterion run into `passed`.
//
// # Safety
// `ids` must be valid for `n` values, `passed` for `cap` flags and `count` a
// valid pointer.
enum MkStatus mk_acceptance_run(const uint32_t *ids,
                                size_t n,
                                bool *passed,
                                size_t cap,
                                size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MONOKINETIC_H */
