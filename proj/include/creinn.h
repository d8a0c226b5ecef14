/* C interface of the creinn shared library.
 *
 * All functions return a status code (creinn_status); outputs travel through
 * pointers. On a non-zero status, creinn_last_error() describes what went
 * wrong (per thread, valid until the next failing call on that thread).
 * Handles are opaque and must be released with the matching _free call.
 */
#ifndef CREINN_H
#define CREINN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum creinn_status {
  CREINN_OK = 0,
  /* bad arguments, unreadable/invalid config or checkpoint */
  CREINN_ERR_CONFIG = 2,
  /* numerical failure (non-finite loss, improper probability box) */
  CREINN_ERR_NUMERIC = 3,
  /* anything unexpected */
  CREINN_ERR_INTERNAL = 4
} creinn_status;

const char* creinn_version(void);
const char* creinn_last_error(void);

/* ---- configuration ------------------------------------------------- */

typedef struct creinn_config creinn_config;

/* Parses a key = value config. When has_seed_override is non-zero, `seed`
 * replaces train.seed before derived seeds (data/noise/eval/ood) default. */
int creinn_config_parse(const char* text, int has_seed_override, uint64_t seed,
                        creinn_config** out);
int creinn_config_load(const char* path, int has_seed_override, uint64_t seed,
                       creinn_config** out);
void creinn_config_free(creinn_config* cfg);

/* ---- trained models ------------------------------------------------ */

typedef struct creinn_model creinn_model;

int creinn_model_load(const char* path, creinn_model** out);
void creinn_model_free(creinn_model* m);
int creinn_model_input_dim(const creinn_model* m, int* out);
int creinn_model_classes(const creinn_model* m, int* out);

/* Interval inference on n rows of d features given as [lo, hi] pairs of
 * row-major n*d arrays. Writes the tightened per-class probability intervals
 * into q_lo/q_hi (n*classes, row-major). */
int creinn_model_predict_box(creinn_model* m, const double* x_lo,
                             const double* x_hi, int n, int d, double* q_lo,
                             double* q_hi);

/* Per-sample uncertainty decomposition and predicted class for the same
 * inputs. Any of au/eu/tu/pred may be NULL to skip that output. */
int creinn_model_uncertainty(creinn_model* m, const double* x_lo,
                             const double* x_hi, int n, int d, double* au,
                             double* eu, double* tu, int* pred);

/* ---- workflow commands --------------------------------------------- */
/* Each writes its artifacts (CSV files, checkpoints, a resolved copy of the
 * config) under out_dir, creating it if needed, and fills an optional
 * summary struct (pass NULL to skip). */

typedef struct creinn_train_summary {
  int best_epoch;
  double best_valid_acc;
  double best_valid_loss;
  double positive_radius_fraction;
} creinn_train_summary;

int creinn_train(const creinn_config* cfg, const char* out_dir,
                 creinn_train_summary* out);

typedef struct creinn_eval_summary {
  double accuracy;
  double auarc_au, auarc_eu, auarc_tu; /* NaN when not selected */
} creinn_eval_summary;

/* measure: "au", "eu", "tu", or NULL/"" for all three. */
int creinn_eval(const creinn_config* cfg, const char* checkpoint,
                const char* out_dir, const char* measure,
                creinn_eval_summary* out);

typedef struct creinn_ensemble_summary {
  int members;
  double accuracy;
  double ensemble_auroc_eu;
  double mean_single_auroc_eu;
  int averaged_proper;
} creinn_ensemble_summary;

int creinn_ensemble(const creinn_config* cfg, const char* const* checkpoints,
                    int n_checkpoints, const char* out_dir,
                    creinn_ensemble_summary* out);

typedef struct creinn_ood_summary {
  double auroc_eu, auprc_eu; /* NaN when not selected */
  double auroc_tu, auprc_tu;
} creinn_ood_summary;

/* measure: "eu", "tu", or NULL/"" for both. */
int creinn_ood(const creinn_config* cfg, const char* checkpoint,
               const char* out_dir, const char* measure,
               creinn_ood_summary* out);

/* kind: "noise" (default when NULL) or "brightness". level_pairs holds
 * n_levels (mu1, mu2) pairs flattened; n_levels == 0 selects the built-in
 * sweep. The first pair is the baseline with ratio 1. */
typedef struct creinn_interval_summary {
  int levels;
} creinn_interval_summary;

int creinn_interval_eval(const creinn_config* cfg, const char* checkpoint,
                         const char* out_dir, const char* kind,
                         const double* level_pairs, int n_levels,
                         creinn_interval_summary* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CREINN_H */
