/*
 * georeg: feature-space geometry of over-parameterized least squares.
 *
 * C interface. All objects are opaque handles created by a *_run / *_create
 * function and released with the matching *_destroy function. Every call
 * returns a georeg_status; on failure a description is available from
 * georeg_last_error() on the same thread until the next failing call.
 * Strings returned through char** out-parameters are owned by the caller and
 * must be released with georeg_string_free().
 */
#ifndef GEOREG_GEOREG_H
#define GEOREG_GEOREG_H

#include <stddef.h>
#include <stdint.h>

#if defined(GEOREG_BUILDING_LIBRARY)
#define GEOREG_API __attribute__((visibility("default")))
#else
#define GEOREG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum georeg_status {
  GEOREG_OK = 0,
  GEOREG_ERR_INVALID_ARGUMENT = 1, /* null handle or unknown name */
  GEOREG_ERR_CONFIG = 2,
  GEOREG_ERR_NUMERIC = 3,
  GEOREG_ERR_SHAPE = 4,
  GEOREG_ERR_IO = 5,
  GEOREG_ERR_DEGENERATE = 6,
  GEOREG_ERR_EXPERIMENT = 7,
  GEOREG_ERR_INTERNAL = 8
} georeg_status;

typedef enum georeg_command {
  GEOREG_CMD_SWEEP = 0,
  GEOREG_CMD_BIAS_VARIANCE = 1,
  GEOREG_CMD_ANGLES = 2,
  GEOREG_CMD_PERTURB = 3
} georeg_command;

typedef struct georeg_config georeg_config;
typedef struct georeg_sweep georeg_sweep;
typedef struct georeg_perturb georeg_perturb;
typedef struct georeg_dataset georeg_dataset;

GEOREG_API const char* georeg_version(void);
GEOREG_API const char* georeg_last_error(void);
GEOREG_API const char* georeg_status_name(georeg_status status);
GEOREG_API void georeg_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

/* Parses a JSON settings document (or a run manifest) and resolves it for
 * `command`: preset defaults, command defaults and validation. */
GEOREG_API georeg_status georeg_config_parse(const char* json, georeg_command command,
                                             georeg_config** out);
GEOREG_API void georeg_config_destroy(georeg_config* config);
/* Fully resolved settings as JSON. */
GEOREG_API georeg_status georeg_config_to_json(const georeg_config* config, char** out_json);

/* ---- sweeps ----------------------------------------------------------- */

GEOREG_API georeg_status georeg_sweep_run(const georeg_config* config, georeg_sweep** out);
GEOREG_API void georeg_sweep_destroy(georeg_sweep* sweep);
GEOREG_API size_t georeg_sweep_row_count(const georeg_sweep* sweep);
/* Mean and standard error of `metric` at grid row `row`. */
GEOREG_API georeg_status georeg_sweep_metric(const georeg_sweep* sweep, size_t row,
                                             const char* metric, double* mean, double* se);
/* Grid coordinates of a row. */
GEOREG_API georeg_status georeg_sweep_point(const georeg_sweep* sweep, size_t row,
                                            double* np_over_m, double* nf_over_m);
/* NULL when the row succeeded; otherwise the recorded failure. The pointer
 * stays valid for the life of the sweep handle. */
GEOREG_API const char* georeg_sweep_failure(const georeg_sweep* sweep, size_t row);
GEOREG_API double georeg_sweep_elapsed_seconds(const georeg_sweep* sweep);
/* Layout follows the command the config was resolved for. */
GEOREG_API georeg_status georeg_sweep_write_csv(const georeg_sweep* sweep, const char* path);
GEOREG_API georeg_status georeg_sweep_write_svg(const georeg_sweep* sweep, const char* path);

/* ---- single-point diagnostics ---------------------------------------- */

/* Fits one model at the configured point and returns the operator
 * diagnostic JSON: sigma[], theta_deg[], delta_phi_deg[], sigma_max,
 * theta_max_deg, delta_phi_max_deg, frob_I_minus_Pf. */
GEOREG_API georeg_status georeg_angles_run(const georeg_config* config, char** out_json);

GEOREG_API georeg_status georeg_perturb_run(const georeg_config* config, georeg_perturb** out);
GEOREG_API void georeg_perturb_destroy(georeg_perturb* perturb);
GEOREG_API size_t georeg_perturb_record_count(const georeg_perturb* perturb);
GEOREG_API georeg_status georeg_perturb_write_csv(const georeg_perturb* perturb, const char* path);
GEOREG_API georeg_status georeg_perturb_summary_json(const georeg_perturb* perturb,
                                                     char** out_json);
GEOREG_API georeg_status georeg_perturb_write_svg(const georeg_perturb* perturb, const char* path);

/* ---- datasets --------------------------------------------------------- */

#define GEOREG_STREAM_TRAIN 3u
#define GEOREG_STREAM_TRAIN_PAIR 4u
#define GEOREG_STREAM_TEST 5u

/* Samples one data set of the configured point (teacher drawn from the same
 * seed) from the named stream. */
GEOREG_API georeg_status georeg_dataset_sample(const georeg_config* config, uint64_t stream_tag,
                                               georeg_dataset** out);
GEOREG_API georeg_status georeg_dataset_read_csv(const char* path, georeg_dataset** out);
GEOREG_API georeg_status georeg_dataset_write_csv(const georeg_dataset* data, const char* path);
GEOREG_API void georeg_dataset_destroy(georeg_dataset* data);
GEOREG_API size_t georeg_dataset_rows(const georeg_dataset* data);
GEOREG_API size_t georeg_dataset_features(const georeg_dataset* data);
/* Row-major copy of X into `buffer` (rows * features doubles). */
GEOREG_API georeg_status georeg_dataset_copy_inputs(const georeg_dataset* data, double* buffer,
                                                    size_t length);
GEOREG_API georeg_status georeg_dataset_copy_labels(const georeg_dataset* data, double* buffer,
                                                    size_t length);

#ifdef __cplusplus
}
#endif

#endif /* GEOREG_GEOREG_H */
