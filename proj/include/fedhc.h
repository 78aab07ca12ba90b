/*
 * fedhc — hierarchical clustered federated learning simulator for LEO
 * constellations. C API of the shared library: opaque handles, status codes,
 * thread-local error messages. The CLI and language bindings link this.
 */
#ifndef FEDHC_H
#define FEDHC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FEDHC_API __declspec(dllexport)
#else
#define FEDHC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fedhc_status {
    FEDHC_OK = 0,
    FEDHC_ERR_CONFIG = 1,  /* bad or inconsistent configuration */
    FEDHC_ERR_RUNTIME = 2, /* failure while simulating */
    FEDHC_ERR_IO = 3,      /* filesystem problems */
    FEDHC_ERR_ARG = 4      /* null/invalid argument to the API itself */
} fedhc_status;

typedef struct fedhc_config fedhc_config;
typedef struct fedhc_result fedhc_result;

FEDHC_API const char* fedhc_version(void);

/* Message for the most recent failure on this thread; never NULL. */
FEDHC_API const char* fedhc_last_error(void);

/* --- configuration ------------------------------------------------------ */

FEDHC_API fedhc_status fedhc_config_load_file(const char* path, fedhc_config** out);
FEDHC_API fedhc_status fedhc_config_load_string(const char* json_text, fedhc_config** out);
FEDHC_API fedhc_status fedhc_config_set_seed(fedhc_config* config, uint64_t seed);
FEDHC_API fedhc_status fedhc_config_set_method(fedhc_config* config, const char* method);
FEDHC_API fedhc_status fedhc_config_set_k(fedhc_config* config, int k);
FEDHC_API void fedhc_config_free(fedhc_config* config);

/* --- running ------------------------------------------------------------ */

/*
 * Runs the configured simulation. When out_dir is non-NULL, writes
 * metrics.csv, summary.json and manifest.json there (config_path is echoed
 * into the manifest and may be NULL). When out_result is non-NULL the caller
 * owns the returned handle.
 */
FEDHC_API fedhc_status fedhc_run(const fedhc_config* config, const char* out_dir,
                                 const char* config_path, fedhc_result** out_result);

FEDHC_API double fedhc_result_final_accuracy(const fedhc_result* result);
FEDHC_API int fedhc_result_rounds_executed(const fedhc_result* result);
FEDHC_API int fedhc_result_rounds_to_target(const fedhc_result* result);
FEDHC_API int fedhc_result_reached_target(const fedhc_result* result);
FEDHC_API double fedhc_result_total_time_s(const fedhc_result* result);
FEDHC_API double fedhc_result_total_time_parallel_s(const fedhc_result* result);
FEDHC_API double fedhc_result_total_energy_j(const fedhc_result* result);
FEDHC_API uint64_t fedhc_result_partition_hash(const fedhc_result* result);
FEDHC_API void fedhc_result_free(fedhc_result* result);

/*
 * Runs one simulation per (method, K) with the shared seed and writes
 * table.csv / table.md under out_dir. methods entries are the method names;
 * the centralized baseline runs once regardless of the K list.
 */
FEDHC_API fedhc_status fedhc_compare(const fedhc_config* config, const int* k_values, size_t n_k,
                                     const char* const* methods, size_t n_methods,
                                     const char* out_dir);

/* Re-shapes a run directory's metrics.csv into tidy (round, metric, value). */
FEDHC_API fedhc_status fedhc_plotdata(const char* run_dir, const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* FEDHC_H */
