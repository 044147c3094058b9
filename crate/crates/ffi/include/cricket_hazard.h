#ifndef CRICKET_HAZARD_H
#define CRICKET_HAZARD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ChModel {
  CH_MODEL_VARYING = 0,
  CH_MODEL_CONSTANT = 1,
} ChModel;

// Result codes shared by every fallible function.
typedef enum ChStatus {
  CH_STATUS_OK = 0,
  CH_STATUS_NULL_POINTER = 1,
  CH_STATUS_INVALID_UTF8 = 2,
  CH_STATUS_PARSE = 3,
  CH_STATUS_FORMAT = 4,
  CH_STATUS_INVALID_CONFIG = 5,
  CH_STATUS_INVALID_PARAMS = 6,
  CH_STATUS_USAGE = 7,
  CH_STATUS_IO = 8,
  CH_STATUS_BUFFER_TOO_SMALL = 9,
  CH_STATUS_PANIC = 10,
} ChStatus;

// Opaque career handle.
typedef struct ChCareer ChCareer;

// Opaque posterior samples handle.
typedef struct ChSamples ChSamples;

typedef struct ChCareerSummary {
  size_t innings;
  size_t not_outs;
  // Runs per dismissal; NaN when there are no dismissals.
  double average;
} ChCareerSummary;

typedef struct ChEvidence {
  double log_z;
  // Standard error of `log_z`.
  double standard_error_log;
} ChEvidence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a
// successful one. Valid until the next call into this library.
const char *ch_last_error(void);

// Library version as a static NUL-terminated string.
const char *ch_version(void);

// Parses career text (one innings per line, `*` marks a not-out).
//
// # Safety
// `text` and `player_id` must be NUL-terminated strings; `out` must be
// writable.
enum ChStatus ch_career_parse(const char *text, const char *player_id, struct ChCareer **out);

// Loads a career file; the player id is the file stem.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum ChStatus ch_career_load(const char *path, struct ChCareer **out);

// # Safety
// `career` must come from this library and not be freed twice. NULL is a
// no-op.
void ch_career_free(struct ChCareer *career);

// # Safety
// `career` must be a live handle; `out` must be writable.
enum ChStatus ch_career_summary(const struct ChCareer *career, struct ChCareerSummary *out);

// Log likelihood of `params` (4 values for the varying model, 1 for the
// constant model) on `career`.
//
// # Safety
// `career` must be a live handle; `params` must point to `len` values;
// `out` must be writable.
enum ChStatus ch_log_likelihood(const struct ChCareer *career,
                                enum ChModel model,
                                const double *params,
                                size_t len,
                                double *out);

// Runs a Metropolis-Hastings chain with adaptive step sizes during burn-in.
//
// # Safety
// `career` must be a live handle; `out` must be writable.
enum ChStatus ch_fit(const struct ChCareer *career,
                     enum ChModel model,
                     uint64_t iterations,
                     uint64_t burn_in,
                     uint64_t thin,
                     uint64_t seed,
                     struct ChSamples **out);

// # Safety
// `samples` must come from this library and not be freed twice. NULL is a
// no-op.
void ch_samples_free(struct ChSamples *samples);

// Number of retained draws; 0 for NULL.
//
// # Safety
// `samples` must be NULL or a live handle.
size_t ch_samples_len(const struct ChSamples *samples);

// Parameters per draw; 0 for NULL.
//
// # Safety
// `samples` must be NULL or a live handle.
size_t ch_samples_dim(const struct ChSamples *samples);

// Overall acceptance rate; NaN for NULL.
//
// # Safety
// `samples` must be NULL or a live handle.
double ch_samples_acceptance_rate(const struct ChSamples *samples);

// Copies the draws row-major (`len * dim` values) into `buf`.
//
// # Safety
// `samples` must be a live handle; `buf` must hold `buf_len` values.
enum ChStatus ch_samples_copy(const struct ChSamples *samples, double *buf, size_t buf_len);

// Posterior means and standard deviations, `dim` values each.
//
// # Safety
// `samples` must be a live handle; `means` and `sds` must hold `len`
// values.
enum ChStatus ch_samples_summary(const struct ChSamples *samples,
                                 double *means,
                                 double *sds,
                                 size_t len);

// # Safety
// `samples` must be a live handle; `path` a NUL-terminated string.
enum ChStatus ch_samples_save(const struct ChSamples *samples, const char *path);

// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum ChStatus ch_samples_load(const char *path, struct ChSamples **out);

// Annealed importance sampling estimate of the log evidence, with the
// default schedule exponent and moves per temperature.
//
// # Safety
// `career` must be a live handle; `out` must be writable.
enum ChStatus ch_ais_log_evidence(const struct ChCareer *career,
                                  enum ChModel model,
                                  size_t num_runs,
                                  size_t num_temperatures,
                                  uint64_t seed,
                                  struct ChEvidence *out);

// Constant-model log evidence by quadrature.
//
// # Safety
// `career` must be a live handle; `out` must be writable.
enum ChStatus ch_quadrature_log_evidence_constant(const struct ChCareer *career, double *out);

// Posterior-predictive pmf over `0..=x_max` (`x_max + 1` values) and the
// mass beyond `x_max`.
//
// # Safety
// `samples` must be a live handle; `pmf` must hold `pmf_len` values;
// `tail_mass` must be writable.
enum ChStatus ch_predictive(const struct ChSamples *samples,
                            uint32_t x_max,
                            double *pmf,
                            size_t pmf_len,
                            double *tail_mass);

// Probability that the named query holds between players `a` and `b`.
// With `cross_product` false the draws are paired after seeded shuffles.
//
// # Safety
// `a` and `b` must be live handles; `query` a NUL-terminated string;
// `out` must be writable.
enum ChStatus ch_compare(const struct ChSamples *a,
                         const struct ChSamples *b,
                         const char *query,
                         bool cross_product,
                         uint64_t seed,
                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRICKET_HAZARD_H */
