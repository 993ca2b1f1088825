// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

/* C interface to the cpmdet library. All functions return a cpm_status;
 * on failure cpm_last_error() holds a message for the calling thread. */

#ifndef CPMDET_CPMDET_H
#define CPMDET_CPMDET_H

#include <stddef.h>
#include <stdint.h>

#if defined(CPMDET_BUILDING)
#define CPM_API __attribute__((visibility("default")))
#else
#define CPM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cpm_status {
    CPM_OK = 0,
    CPM_E_PARAMETER = 1,
    CPM_E_ALPHABET = 2,
    CPM_E_RANGE = 3,
    CPM_E_MISMATCH = 4,
    CPM_E_TOO_LONG = 5,
    CPM_E_IO = 6,
    CPM_E_CONFIG = 7,
    CPM_E_EMPTY_INPUT = 8,
    CPM_E_INTERNAL = 99
} cpm_status;

typedef enum cpm_phase_mode {
    CPM_PHASE_KNOWN_ZERO = 0,
    CPM_PHASE_EXPLICIT = 1,
    CPM_PHASE_UNIFORM_RANDOM = 2
} cpm_phase_mode;

typedef struct cpm_scheme cpm_scheme;
typedef struct cpm_detector cpm_detector;
typedef struct cpm_experiment cpm_experiment;

/* Short upper-case name of a status, e.g. "CONFIG". */
CPM_API const char* cpm_status_name(cpm_status s);
CPM_API const char* cpm_last_error(void);
CPM_API const char* cpm_version(void);

/* ---- schemes and signals ---------------------------------------------- */

/* name: "PCMFM" or "ARTM_CPM". */
CPM_API cpm_status cpm_scheme_create(const char* name, cpm_scheme** out);
CPM_API void cpm_scheme_destroy(cpm_scheme* s);
CPM_API int cpm_scheme_order(const cpm_scheme* s);
CPM_API int cpm_scheme_pulse_length(const cpm_scheme* s);
CPM_API int cpm_scheme_phase_states(const cpm_scheme* s);
/* Number of pilot symbols wrapped around the data (head plus tail). */
CPM_API int cpm_scheme_pilot_count(const cpm_scheme* s);

/* Modulates data framed by pilots into interleaved I/Q doubles.
 * iq must hold 2*k*(n_data + pilot_count) values; *n_samples receives the complex count. */
CPM_API cpm_status cpm_modulate(const cpm_scheme* s, int k, const int* data, size_t n_data, double* iq, size_t iq_capacity,
                                size_t* n_samples);

/* In-place carrier rotation plus AWGN. noiseless != 0 skips the noise. */
CPM_API cpm_status cpm_channel(const cpm_scheme* s, int k, double* iq, size_t n_samples, double ebn0_db, int noiseless,
                               cpm_phase_mode mode, double phase, uint64_t seed, double* applied_phase);

/* detector: MLSD_COHERENT, MLSD_PHASE_DEVIATION, PROPOSED or MSD. */
CPM_API cpm_status cpm_detector_create(const cpm_scheme* s, int k, const char* detector, int n_survivors, int window,
                                       cpm_detector** out);
CPM_API void cpm_detector_destroy(cpm_detector* d);
/* Detects data symbols from a pilot-framed I/Q frame. */
CPM_API cpm_status cpm_detect(cpm_detector* d, const double* iq, size_t n_samples, int* data, size_t data_capacity,
                              size_t* n_data, double* final_metric);

/* Exhaustive-search reference detectors (at most 12 data symbols). */
CPM_API cpm_status cpm_oracle_detect(const cpm_scheme* s, int k, int coherent, const double* iq, size_t n_samples,
                                     int* data, size_t data_capacity, size_t* n_data, double* final_metric);

/* ---- analysis ---------------------------------------------------------- */

/* method: "MSD", "MLSD" or "PROPOSED". */
CPM_API cpm_status cpm_complexity(const char* method, const char* scheme, int k, int n_p, long long* n_mul,
                                  long long* n_add);
CPM_API cpm_status cpm_union_bound(const char* scheme, int depth, int terms, double ebn0_db, double* bound);
CPM_API cpm_status cpm_ber_confint(long long errors, long long bits, double* estimate, double* ci_low, double* ci_high);
CPM_API double cpm_q_function(double x);

/* ---- experiments ------------------------------------------------------- */

typedef struct cpm_ber_record {
    char scheme[16];
    char detector[32];
    double ebn0_db;
    long long frames;
    long long bits;
    long long errors;
    double ber;
    double ci_low;
    double ci_high;
    double elapsed_seconds;
    uint64_t seed;
} cpm_ber_record;

typedef void (*cpm_progress_fn)(const cpm_ber_record* record, void* user);

CPM_API cpm_status cpm_experiment_create(cpm_experiment** out);
CPM_API cpm_status cpm_experiment_load(const char* path, cpm_experiment** out);
CPM_API void cpm_experiment_destroy(cpm_experiment* e);
/* key matches the CLI flag name without dashes prefix, e.g. "frame-len". */
CPM_API cpm_status cpm_experiment_set(cpm_experiment* e, const char* key, const char* value);
CPM_API cpm_status cpm_experiment_validate(const cpm_experiment* e);
/* Copies the config as JSON; *needed receives the size including the terminator.
 * buf == NULL with capacity 0 only queries the size. */
CPM_API cpm_status cpm_experiment_config_json(const cpm_experiment* e, char* buf, size_t capacity, size_t* needed);
CPM_API cpm_status cpm_experiment_run(cpm_experiment* e, cpm_progress_fn progress, void* user);
CPM_API size_t cpm_experiment_record_count(const cpm_experiment* e);
CPM_API cpm_status cpm_experiment_record(const cpm_experiment* e, size_t index, cpm_ber_record* out);
/* Non-zero when an output path is configured. */
CPM_API int cpm_experiment_has_output(const cpm_experiment* e);
/* Writes the records CSV to the configured output path plus a summary JSON next to it. */
CPM_API cpm_status cpm_experiment_write(const cpm_experiment* e);

/* ---- file-level tools -------------------------------------------------- */

CPM_API cpm_status cpm_dump_tables(const char* dir, int k, int traceback_n);
CPM_API cpm_status cpm_dump_pulse(const char* scheme, int k, const char* path);
CPM_API cpm_status cpm_dump_spectrum(const char* scheme, int depth, const char* path);
/* Merges record CSVs into one plot-data CSV. */
CPM_API cpm_status cpm_emit_curves(const char* const* record_paths, size_t n_paths, const char* out_path);

typedef struct cpm_oracle_report {
    long long trials;
    long long coherent_agree;
    long long noncoherent_agree;
    long long metric_dominance;
    int passed;
} cpm_oracle_report;

CPM_API cpm_status cpm_oracle_suite(const char* scheme, long long trials, int max_len, double ebn0_db, uint64_t seed,
                                    cpm_oracle_report* out);

#ifdef __cplusplus
}
#endif

#endif
