/* stem: peak detection for ChIP-Seq-style count data.
 *
 * Shared-library C API: opaque handles, integer status codes. All functions
 * returning int use STEM_OK (0) for success; on failure stem_last_error()
 * holds a thread-local message describing what went wrong.
 */
#ifndef STEM_STEM_H
#define STEM_STEM_H

#include <stddef.h>
#include <stdint.h>

#if defined _WIN32
#define STEM_API __declspec(dllexport)
#else
#define STEM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stem_status {
  STEM_OK = 0,
  STEM_ERR_IO = 1,      /* file missing / unreadable / unwritable */
  STEM_ERR_PARSE = 2,   /* malformed input file */
  STEM_ERR_INVALID = 3, /* invalid argument or configuration */
  STEM_ERR_STATE = 4,   /* inconsistent artifacts (e.g. kernel/table mismatch) */
  STEM_ERR_NUMERIC = 5, /* numerical failure (singular design, degenerate fit) */
  STEM_ERR_INTERNAL = 6
} stem_status;

STEM_API const char* stem_version(void);

/* Thread-local message for the most recent failing call. */
STEM_API const char* stem_last_error(void);

/* ---- configuration ----------------------------------------------------- */

typedef struct stem_config stem_config;

STEM_API stem_config* stem_config_new(void);
STEM_API void stem_config_free(stem_config* cfg);

/* Keys are the documented key=value names (e.g. "ip", "kernel", "q",
 * "seed", "threads"). Unknown keys are an error. */
STEM_API int stem_config_set(stem_config* cfg, const char* key, const char* value);

/* Copies the value into buf (truncating); returns the full length. */
STEM_API int stem_config_get(const stem_config* cfg, const char* key, char* buf, size_t buflen);

/* key=value lines; '#' comments allowed. */
STEM_API int stem_config_load(stem_config* cfg, const char* path);

/* ---- pipeline stages ----------------------------------------------------
 * Each stage reads inputs named by the config and writes its artifacts under
 * the config's out directory (key "out"). */

/* Estimates the strand shift and peak-shape kernel from an IP tag file.
 * Writes shift.txt, kernel.tsv, profiles.tsv, align_report.txt. */
STEM_API int stem_run_align(const stem_config* cfg);

/* Builds the Monte Carlo survival table for a kernel over a data lambda
 * range (keys table_lambda_min/table_lambda_max). Writes table.tsv. */
STEM_API int stem_run_table(const stem_config* cfg);

/* Full peak calling: smoothing, candidate maxima, background regression,
 * Monte Carlo p-values, BH selection. Writes peaks.tsv, run_report.txt and
 * optional dumps. */
STEM_API int stem_run_call(const stem_config* cfg);

/* Spike-in experiment with known ground truth; writes per-replicate and
 * aggregate FDR/power tables. */
STEM_API int stem_run_simulate(const stem_config* cfg);

/* p-value distribution diagnostics (observed vs theoretical null mixture,
 * optional Control-as-IP empirical null). Writes diagnostics.tsv. */
STEM_API int stem_run_diagnose(const stem_config* cfg);

/* ---- direct artifact access --------------------------------------------- */

typedef struct stem_kernel stem_kernel;

STEM_API stem_kernel* stem_kernel_load(const char* path);
STEM_API void stem_kernel_free(stem_kernel* k);
STEM_API int64_t stem_kernel_width(const stem_kernel* k);
/* Weight at signed offset from the center; 0 outside the support. */
STEM_API double stem_kernel_weight(const stem_kernel* k, int64_t offset);
STEM_API uint64_t stem_kernel_fingerprint(const stem_kernel* k);

typedef struct stem_table stem_table;

STEM_API stem_table* stem_table_load(const char* path);
STEM_API void stem_table_free(stem_table* t);
STEM_API double stem_table_lambda_min(const stem_table* t);
STEM_API double stem_table_lambda_max(const stem_table* t);
STEM_API uint64_t stem_table_fingerprint(const stem_table* t);

/* p-value of a local maximum of the given height at background rate lambda.
 * below_resolution (may be NULL) is set when the value is smaller than the
 * Monte Carlo resolution. */
STEM_API int stem_table_pvalue(const stem_table* t, double height, double lambda, double* p,
                               int* below_resolution);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STEM_STEM_H */
