/*---------------------------------------------------------------------------*
 * Copyright perpsim contributors
 * SPDX-License-Identifier: Apache-2.0
 *---------------------------------------------------------------------------*/
/*! \file perpsim/perpsim.h
 *  \brief Stable C interface to the perpetuity tail simulator.
 *
 * Every function returns a perpsim_status. On failure the message is
 * available from perpsim_last_error() until the next call on the same
 * thread. Handles are opaque and must be released with the matching _free.
 *---------------------------------------------------------------------------*/
#ifndef PERPSIM_PERPSIM_H
#define PERPSIM_PERPSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(PERPSIM_BUILDING_LIBRARY)
#    define PERPSIM_API __attribute__((visibility("default")))
#else
#    define PERPSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes for the command line tool */
typedef enum perpsim_status
{
    PERPSIM_OK = 0,
    PERPSIM_ERR_INTERNAL = 1,
    PERPSIM_ERR_CONFIG = 2,   /* bad configuration or argument */
    PERPSIM_ERR_LYAPUNOV = 3, /* state-dependent sampler refused delta */
    PERPSIM_ERR_NUMERIC = 4,  /* root finding, eigen solve, zero estimate */
    PERPSIM_ERR_IO = 5
} perpsim_status;

typedef struct perpsim_config perpsim_config;
typedef struct perpsim_results perpsim_results;

typedef struct perpsim_run_options
{
    unsigned workers;
    int record_time; /* 0: wall_ms is written as NA */
    int has_seed_override;
    uint64_t seed_override;
} perpsim_run_options;

typedef struct perpsim_row
{
    double delta;
    uint64_t reps;
    double estimate;
    double std_err;
    int has_cv;
    double cv;
    double ci_lo;
    double ci_hi;
    double mean_steps;
    uint64_t max_steps;
    uint64_t capped_count;
    uint64_t seed;
    double wall_ms; /* NaN when not recorded */
} perpsim_row;

typedef struct perpsim_tilt_info
{
    double theta_star;
    double psi_at_root;
    double mu;
    size_t num_states;
    double largest_admissible_delta; /* of the state-dependent sampler */
} perpsim_tilt_info;

typedef struct perpsim_slope_info
{
    double slope;
    double std_err;
    double theta_star;
} perpsim_slope_info;

typedef struct perpsim_drift_report
{
    size_t probes;
    size_t passed;
    double worst_ratio;
    double worst_std_err;
    double budget;
    int guaranteed;
} perpsim_drift_report;

PERPSIM_API char const* perpsim_version(void);
PERPSIM_API char const* perpsim_last_error(void);

/* After PERPSIM_ERR_LYAPUNOV: drift budget and largest admissible delta */
PERPSIM_API void perpsim_last_refusal(double* budget, double* largest_delta);

PERPSIM_API perpsim_run_options perpsim_default_run_options(void);

/* Configuration */
PERPSIM_API perpsim_status perpsim_config_load(char const* path,
                                               perpsim_config** out);
PERPSIM_API perpsim_status perpsim_config_parse(char const* text,
                                                perpsim_config** out);
PERPSIM_API perpsim_status perpsim_config_appendix(uint64_t reps,
                                                   perpsim_config** out);
PERPSIM_API perpsim_status perpsim_config_write(perpsim_config const* cfg,
                                                char const* path);
PERPSIM_API size_t perpsim_config_size(perpsim_config const* cfg);
PERPSIM_API char const* perpsim_config_name(perpsim_config const* cfg,
                                            size_t index);
PERPSIM_API void perpsim_config_free(perpsim_config* cfg);

/* Run every scenario in order */
PERPSIM_API perpsim_status perpsim_run(perpsim_config const* cfg,
                                       perpsim_run_options const* opts,
                                       perpsim_results** out);

PERPSIM_API size_t perpsim_results_size(perpsim_results const* res);
PERPSIM_API perpsim_status perpsim_results_row(perpsim_results const* res,
                                               size_t index,
                                               perpsim_row* row);
/* JSON object describing how row `index` was produced */
PERPSIM_API char const* perpsim_results_metadata(perpsim_results const* res,
                                                 size_t index);
/* Full CSV text including header; owned by the handle */
PERPSIM_API char const* perpsim_results_csv(perpsim_results const* res);
PERPSIM_API perpsim_status
perpsim_results_write_csv(perpsim_results const* res, char const* path);
PERPSIM_API void perpsim_results_free(perpsim_results* res);

/* Analyses of a single scenario */
PERPSIM_API perpsim_status perpsim_theta_star(perpsim_config const* cfg,
                                              size_t index,
                                              perpsim_tilt_info* out);
/* Copies min-normalized u at theta*; *count receives the state count */
PERPSIM_API perpsim_status perpsim_eigvec(perpsim_config const* cfg,
                                          size_t index,
                                          double* buf,
                                          size_t capacity,
                                          size_t* count);
PERPSIM_API perpsim_status perpsim_slope(perpsim_config const* cfg,
                                         size_t index,
                                         perpsim_run_options const* opts,
                                         perpsim_slope_info* out,
                                         perpsim_results** points);
PERPSIM_API perpsim_status
perpsim_verify_lyapunov(perpsim_config const* cfg,
                        size_t index,
                        size_t probes,
                        uint64_t samples_per_probe,
                        perpsim_drift_report* out);

#ifdef __cplusplus
}
#endif

#endif /* PERPSIM_PERPSIM_H */
