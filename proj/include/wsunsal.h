/* C interface for the weighted-L1 SUnSAL hyperspectral classification
 * library. All entry points return a status code; on failure a thread-local
 * message with details is available from wsun_last_error(). Handles are
 * opaque and must be released with their matching destroy call. */

#ifndef WSUNSAL_H
#define WSUNSAL_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wsun_status {
  WSUN_OK = 0,
  WSUN_ERR_UNKNOWN,
  WSUN_ERR_INVALID_ARGUMENT,
  WSUN_ERR_INVALID_CONFIG,
  WSUN_ERR_IO,
  WSUN_ERR_NOT_POSITIVE_DEFINITE,
  WSUN_ERR_DIMENSION_MISMATCH,
  WSUN_ERR_SIZE_MISMATCH,
  WSUN_ERR_NON_FINITE_VALUE,
  WSUN_ERR_NEGATIVE_LABEL,
  WSUN_ERR_NON_CONTIGUOUS_CLASSES,
  WSUN_ERR_BAND_OUT_OF_RANGE,
  WSUN_ERR_EMPTY_CLASS,
  WSUN_ERR_EMPTY_DICTIONARY,
  WSUN_ERR_EVEN_WINDOW,
  WSUN_ERR_NEGATIVE_THRESHOLD,
  WSUN_ERR_NON_FINITE_ITERATE,
  WSUN_ERR_EMPTY_CLASS_RANGE,
  WSUN_ERR_ZERO_NORM,
  WSUN_ERR_UNLABELED_TEST_PIXEL,
  WSUN_ERR_EMPTY_MATRIX,
  WSUN_ERR_INCONSISTENT_CLASS_COUNT
} wsun_status;

/* Stable name of a status code (e.g. "NotPositiveDefinite"). */
const char* wsun_status_name(wsun_status status);

/* Message of the most recent failure on this thread; empty string if none. */
const char* wsun_last_error(void);

/* ---- pipeline configuration ------------------------------------------- */

typedef struct wsun_config_s wsun_config;

wsun_status wsun_config_create(wsun_config** out);
void wsun_config_destroy(wsun_config* cfg);
/* Loads a key = value manifest (same keys as wsun_config_set). */
wsun_status wsun_config_load_file(wsun_config* cfg, const char* path);
/* Sets one key. Keys: cube, cube_header, labels, labels_header, output_dir,
 * fraction, seed, trials, kernel (linear|rbf), sigma, weights
 * (identity|euclidean|kernel-angle), lambda, mu, max_iter, tol, positivity,
 * window, neighbors, neighbor_space (original|kernel), band_removal
 * (e.g. "104-108,150-163,220"), normalize, prefilter_window, threads,
 * dump_residuals, sweep_lambda, sweep_window, sweep_neighbors,
 * residual_checkpoint. */
wsun_status wsun_config_set(wsun_config* cfg, const char* key, const char* value);
/* Applies WSUNSAL_* environment path overrides. */
wsun_status wsun_config_apply_env(wsun_config* cfg);
wsun_status wsun_config_validate(const wsun_config* cfg);

/* ---- pipeline runs ----------------------------------------------------- */

typedef struct wsun_metrics_s {
  double overall_accuracy;   /* fraction in [0,1] */
  double average_accuracy;   /* fraction in [0,1] */
  double kappa;
} wsun_metrics;

typedef struct wsun_trial_metrics_s {
  wsun_metrics raw;   /* argmin on per-pixel residuals */
  wsun_metrics post;  /* after cosine-neighbor spatial postprocessing */
  /* tolerated degeneracies, reported as warnings by the CLI */
  long long degenerate_weight_pixels;   /* all dictionary distances zero */
  long long zero_norm_neighbors_skipped;
} wsun_trial_metrics;

typedef struct wsun_experiment_metrics_s {
  wsun_metrics raw_mean;
  wsun_metrics post_mean;
  double raw_oa_std;
  double post_oa_std;
  int trials;
} wsun_experiment_metrics;

/* One full trial with seed = config seed + trial_index. When write_outputs
 * is nonzero, class maps, split and reports are written to output_dir. */
wsun_status wsun_run_trial(const wsun_config* cfg, int trial_index, int write_outputs,
                           wsun_trial_metrics* out);

/* Runs the configured number of trials and writes aggregate artifacts. */
wsun_status wsun_run_experiment(const wsun_config* cfg, wsun_experiment_metrics* out);

/* Metrics for a saved class map against a label grid. split_path may be NULL
 * (all labeled pixels) or a split file (test pixels only). json_out_path may
 * be NULL. */
wsun_status wsun_evaluate(const char* classmap_path, const char* labels_path,
                          const char* split_path, const char* json_out_path,
                          wsun_metrics* out);

/* Grid over sweep_lambda x sweep_window x sweep_neighbors on the seed's
 * split; writes sweep.csv to output_dir. */
wsun_status wsun_sweep(const wsun_config* cfg);

/* ---- direct solver access ---------------------------------------------- */

enum { WSUN_KERNEL_LINEAR = 0, WSUN_KERNEL_RBF = 1 };
enum { WSUN_WEIGHTS_IDENTITY = 0, WSUN_WEIGHTS_EUCLIDEAN = 1, WSUN_WEIGHTS_KERNEL_ANGLE = 2 };

/* Unmixes one pixel against a dictionary given as band_count x column_count
 * column-major doubles. x_out must hold column_count doubles. iterations_out
 * and converged_out may be NULL. */
wsun_status wsun_unmix_pixel(int band_count, int column_count, const double* dictionary,
                             const double* pixel, int kernel_kind, double sigma, int weight_mode,
                             double lambda, double mu, int max_iter, double tol, int positivity,
                             double* x_out, int* iterations_out, int* converged_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WSUNSAL_H */
