/* C interface to the mfp simulation library.
 *
 * Objects are opaque handles created and released through this API. Every
 * fallible call returns an mfp_status; on failure the message of the last
 * error on the calling thread is available from mfp_last_error_message().
 * Strings produced by the library come back as mfp_text handles. */
#ifndef MFP_H
#define MFP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MFP_BUILDING_LIBRARY)
#    define MFP_API __declspec(dllexport)
#  else
#    define MFP_API __declspec(dllimport)
#  endif
#else
#  define MFP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mfp_status {
    MFP_OK = 0,
    MFP_ERR_INVALID_ARGUMENT = 1,
    MFP_ERR_PARSE = 2,
    MFP_ERR_VALIDATION = 3,
    MFP_ERR_NONPOSITIVE_PRICE = 4,
    MFP_ERR_HORIZON_OUT_OF_RANGE = 5,
    MFP_ERR_STEP_SIZE_TOO_LARGE = 6,
    MFP_ERR_FIXED_POINT_DIVERGENCE = 7,
    MFP_ERR_REGIME_MISMATCH = 8,
    MFP_ERR_BRANCH_CROSSING = 9,
    MFP_ERR_DEGENERATE_SAMPLE = 10,
    MFP_ERR_WINDOW_TOO_LARGE = 11,
    MFP_ERR_NOT_OSCILLATORY = 12,
    MFP_ERR_NO_ROOT = 13,
    MFP_ERR_IO = 14,
    MFP_ERR_INTERNAL = 15
} mfp_status;

typedef struct mfp_config mfp_config;
typedef struct mfp_trajectory mfp_trajectory;
typedef struct mfp_text mfp_text;

typedef struct mfp_sample {
    double t, X, Y, S, ED, chi, K, sf;
} mfp_sample;

MFP_API const char* mfp_version(void);
MFP_API const char* mfp_status_name(mfp_status status);
/* Message of the last failed call on this thread ("" if none). */
MFP_API const char* mfp_last_error_message(void);
/* Failing step index of the last StepSizeTooLarge error, -1 otherwise. */
MFP_API long long mfp_last_error_step(void);

/* text */
MFP_API const char* mfp_text_data(const mfp_text* text);
MFP_API size_t mfp_text_size(const mfp_text* text);
MFP_API void mfp_text_free(mfp_text* text);

/* configuration */
MFP_API mfp_status mfp_config_default(mfp_config** out);
MFP_API mfp_status mfp_config_parse(const char* text, mfp_config** out);
MFP_API mfp_status mfp_config_load(const char* path, mfp_config** out);
MFP_API mfp_status mfp_config_clone(const mfp_config* config, mfp_config** out);
/* key is "section.key" or a bare key. */
MFP_API mfp_status mfp_config_set(mfp_config* config, const char* key, const char* value);
/* "key=value" */
MFP_API mfp_status mfp_config_set_assignment(mfp_config* config, const char* assignment);
/* Applies "key=value" assignments in order and validates once; on failure
   the config is unchanged. */
MFP_API mfp_status mfp_config_set_many(mfp_config* config, const char* const* assignments, size_t count);
MFP_API mfp_status mfp_config_echo(const mfp_config* config, mfp_text** out);
MFP_API mfp_status mfp_config_seed(const mfp_config* config, uint64_t* out);
MFP_API mfp_status mfp_config_agents(const mfp_config* config, size_t* out);
MFP_API mfp_status mfp_config_precision(const mfp_config* config, int* out);
MFP_API void mfp_config_free(mfp_config* config);
MFP_API const char* mfp_default_config_text(void);

/* macro runs */
/* Runs the configured macro model; *report receives the JSON run report. */
MFP_API mfp_status mfp_run(const mfp_config* config, mfp_trajectory** out, mfp_text** report);
MFP_API size_t mfp_trajectory_size(const mfp_trajectory* traj);
MFP_API size_t mfp_trajectory_steps(const mfp_trajectory* traj);
MFP_API mfp_status mfp_trajectory_sample(const mfp_trajectory* traj, size_t index, mfp_sample* out);
MFP_API double mfp_trajectory_max_transfer_residual(const mfp_trajectory* traj);
MFP_API mfp_status mfp_trajectory_csv(const mfp_trajectory* traj, int precision, mfp_text** out);
MFP_API mfp_status mfp_trajectory_write_csv(const mfp_trajectory* traj, const char* path, int precision);
MFP_API mfp_status mfp_trajectory_read_csv(const char* path, mfp_trajectory** out);
MFP_API void mfp_trajectory_free(mfp_trajectory* traj);

/* subcommands */
/* Grid spec: "start:stop:step" or "v1,v2,...". */
MFP_API mfp_status mfp_sweep(const mfp_config* config, const char* key, const char* grid, double tail_fraction,
                             unsigned jobs, mfp_text** csv, mfp_text** report);
/* *passed is 1 when every check passed. */
MFP_API mfp_status mfp_verify(const mfp_config* config, int* passed, mfp_text** report);
/* max_steps = 0 runs the configured horizon. *snapshots may be NULL. */
MFP_API mfp_status mfp_micro(const mfp_config* config, size_t agents, size_t max_steps, mfp_trajectory** micro,
                             mfp_text** gap_report, mfp_text** snapshots);
/* traj may be NULL, in which case the configured run is simulated first.
 * qq_count = 0 skips the QQ table. */
MFP_API mfp_status mfp_stats(const mfp_config* config, const mfp_trajectory* traj, double tail_fraction,
                             size_t qq_count, mfp_text** report, mfp_text** qq_csv);
MFP_API double mfp_default_tail_fraction(void);

/* scalar primitives evaluated with the parameters of a config */
MFP_API mfp_status mfp_value_fn(const mfp_config* config, double x, double* out);
MFP_API mfp_status mfp_weight_fn(const mfp_config* config, double delta, double* out);
MFP_API mfp_status mfp_equilibrium_price(const mfp_config* config, double* out);
MFP_API mfp_status mfp_excess_kurtosis(const double* sample, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif
