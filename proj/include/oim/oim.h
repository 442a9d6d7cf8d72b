/*
 * liboim: online influence maximization under edge-level semi-bandit feedback.
 *
 * C interface over the C++ core. All objects are opaque handles owned by the
 * caller and released with the matching *_free function. Every fallible call
 * returns an oim_status; on failure oim_last_error() describes the problem
 * for the calling thread.
 *
 * String outputs use a caller buffer: *needed always receives the required
 * size including the terminating NUL, and OIM_ERR_CAPACITY is returned when
 * `capacity` is too small (nothing is written in that case). Pass a NULL
 * buffer with capacity 0 to query the size.
 */
#ifndef OIM_OIM_H
#define OIM_OIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(OIM_BUILDING_LIBRARY)
#define OIM_API __declspec(dllexport)
#else
#define OIM_API __declspec(dllimport)
#endif
#else
#define OIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oim_status {
  OIM_OK = 0,
  OIM_ERR_ARGUMENT = 1,
  OIM_ERR_PARSE = 2,
  OIM_ERR_IO = 3,
  OIM_ERR_NUMERIC = 4,
  OIM_ERR_CAPACITY = 5,
  OIM_ERR_DIMENSION = 6,
  OIM_ERR_INTERNAL = 7
} oim_status;

typedef struct oim_graph oim_graph;
typedef struct oim_config oim_config;
typedef struct oim_run oim_run;

OIM_API const char* oim_version(void);
OIM_API const char* oim_status_name(oim_status status);
/* Message for the last failing call on this thread; "" if none. */
OIM_API const char* oim_last_error(void);

/* ---- graphs ------------------------------------------------------------ */

/* Edge list of "source target" lines; '#' starts a comment line. With
 * `symmetrize` nonzero each pair becomes two directed edges. */
OIM_API oim_status oim_graph_load_file(const char* path, int symmetrize, oim_graph** out);
OIM_API oim_status oim_graph_load_text(const char* text, size_t length, int symmetrize,
                                       oim_graph** out);
OIM_API size_t oim_graph_node_count(const oim_graph* graph);
OIM_API size_t oim_graph_edge_count(const oim_graph* graph);
OIM_API size_t oim_graph_duplicate_count(const oim_graph* graph);
OIM_API size_t oim_graph_rejected_count(const oim_graph* graph);
/* {"nodes":..,"edges":..,"duplicates":..,"rejected":[{"line":..,"reason":..}]} */
OIM_API oim_status oim_graph_summary_json(const oim_graph* graph, char* buffer, size_t capacity,
                                          size_t* needed);
OIM_API void oim_graph_free(oim_graph* graph);

/* ---- experiment configuration ------------------------------------------ */

OIM_API oim_status oim_config_new(oim_config** out);
OIM_API oim_status oim_config_load(const char* path, oim_config** out);
OIM_API oim_status oim_config_set(oim_config* config, const char* key, const char* value);
OIM_API oim_status oim_config_get(const oim_config* config, const char* key, char* buffer,
                                  size_t capacity, size_t* needed);
OIM_API oim_status oim_config_validate(const oim_config* config);
OIM_API void oim_config_free(oim_config* config);

/* Registry of settable keys, for building CLI flags. */
OIM_API size_t oim_config_key_count(void);
OIM_API const char* oim_config_key_name(size_t index);
OIM_API const char* oim_config_key_section(size_t index);
OIM_API const char* oim_config_key_help(size_t index);

/* ---- optimal baseline ---------------------------------------------------- */

/* Runs the oracle on the true probabilities of the configured graph. Seeds
 * are written to `seeds` (up to `seed_capacity`); *seed_count receives k. */
OIM_API oim_status oim_baseline_compute(const oim_config* config, double* f_opt, uint32_t* seeds,
                                        size_t seed_capacity, size_t* seed_count);

/* ---- experiments --------------------------------------------------------- */

OIM_API oim_status oim_run_experiment(const oim_config* config, oim_run** out);
OIM_API size_t oim_run_round_count(const oim_run* run);
OIM_API size_t oim_run_repetition_count(const oim_run* run);
OIM_API double oim_run_f_opt(const oim_run* run);
/* `round` is 0-based. */
OIM_API oim_status oim_run_round(const oim_run* run, size_t round, double* mean_spread,
                                 double* mean_regret, double* cum_regret);
OIM_API oim_status oim_run_csv(const oim_run* run, char* buffer, size_t capacity, size_t* needed);
OIM_API oim_status oim_run_metadata_json(const oim_run* run, char* buffer, size_t capacity,
                                         size_t* needed);
/* Writes <prefix>.csv and <prefix>.json. */
OIM_API oim_status oim_run_emit(const oim_run* run, const char* prefix);
OIM_API void oim_run_free(oim_run* run);

/* ---- plot data ------------------------------------------------------------ */

/* Aligns result CSVs by row index. Inputs are "path" or "label=path". */
OIM_API oim_status oim_plot_data(const char* const* inputs, size_t input_count, char* buffer,
                                 size_t capacity, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* OIM_OIM_H */
