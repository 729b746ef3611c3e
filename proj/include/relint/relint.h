#ifndef RELINT_RELINT_H
#define RELINT_RELINT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RELINT_BUILDING)
#    define RELINT_API __declspec(dllexport)
#  else
#    define RELINT_API __declspec(dllimport)
#  endif
#else
#  define RELINT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum relint_status {
  RELINT_OK = 0,
  RELINT_E_INVALID_ARGUMENT = 1,
  RELINT_E_MALFORMED_PROBLEM = 2,
  RELINT_E_NUMERICAL = 3,
  RELINT_E_IO = 4,
  RELINT_E_PARSE = 5,
  RELINT_E_LABEL = 6,
  RELINT_E_SPEC = 7,
  RELINT_E_FOLD = 8,
  RELINT_E_DIMENSION = 9,
  RELINT_E_INFEASIBLE = 10,
  RELINT_E_OPTIMIZATION = 11,
  RELINT_E_DEGENERATE = 12,
  RELINT_E_BUDGET = 13,
  RELINT_E_NOT_FOUND = 14,
  RELINT_E_INTERNAL = 15
} relint_status;

typedef struct relint_dataset relint_dataset;
typedef struct relint_server relint_server;

typedef struct relint_analyze_params {
  double delta;       /* model-class relaxation, >= 0 */
  double coverage;    /* prediction interval p, in (0.5, 1) */
  int n_probes;       /* >= 2 */
  uint64_t seed;
  int workers;        /* 0 = hardware threads */
} relint_analyze_params;

typedef struct relint_simulation_spec {
  int n_strong;
  int n_weak;
  int n_irrelevant;
  int n_samples;
  uint64_t seed;
  int weak_group_size;
  double weak_jitter;
  double label_flip_rate;
} relint_simulation_spec;

typedef struct relint_benchmark_options {
  int replicates;
  uint64_t seed;
  int workers;
  int timing;  /* nonzero adds wall-clock columns */
  relint_analyze_params analysis;
} relint_benchmark_options;

typedef struct relint_server_options {
  int64_t session_ttl_seconds;
  int64_t request_budget_ms;
  size_t max_payload_bytes;
  const char* cors_origin;  /* NULL keeps the default "*"; "" disables */
  const char* static_dir;   /* NULL or "" serves no files */
  int workers;
} relint_server_options;

RELINT_API const char* relint_version(void);
RELINT_API const char* relint_status_name(relint_status status);

/* Message of the last failed call on this thread; "" after a success. */
RELINT_API const char* relint_last_error(void);

/* Frees strings returned through char** out parameters. */
RELINT_API void relint_string_free(char* text);

RELINT_API void relint_analyze_params_init(relint_analyze_params* params);
RELINT_API void relint_simulation_spec_init(relint_simulation_spec* spec);
RELINT_API void relint_benchmark_options_init(relint_benchmark_options* options);
RELINT_API void relint_server_options_init(relint_server_options* options);

RELINT_API relint_status relint_dataset_load_csv(const char* path, const char* label_column,
                                                 relint_dataset** out);
RELINT_API relint_status relint_dataset_parse_csv(const char* text, size_t length,
                                                  const char* label_column,
                                                  relint_dataset** out);
RELINT_API int64_t relint_dataset_samples(const relint_dataset* dataset);
RELINT_API int64_t relint_dataset_features(const relint_dataset* dataset);
RELINT_API void relint_dataset_free(relint_dataset* dataset);

/* Full analysis as a JSON document. */
RELINT_API relint_status relint_analyze(const relint_dataset* dataset,
                                        const relint_analyze_params* params,
                                        char** json_out);

/* Analysis followed by a constraint recompute. constraints_json takes the
   same body as PUT /sessions/{id}/constraints. */
RELINT_API relint_status relint_analyze_constrained(const relint_dataset* dataset,
                                                    const relint_analyze_params* params,
                                                    const char* constraints_json,
                                                    char** json_out);

/* Data CSV (label column "label") and ground-truth CSV (feature,class). */
RELINT_API relint_status relint_simulate(const relint_simulation_spec* spec, char** data_csv_out,
                                         char** truth_csv_out);

/* configs_json NULL runs the five standard configurations. Either output
   pointer may be NULL. Sets *all_failed when some config had no successful
   replicate. */
RELINT_API relint_status relint_benchmark(const char* configs_json,
                                          const relint_benchmark_options* options,
                                          char** json_out, char** csv_out, int* all_failed);

/* NULL options take the defaults. */
RELINT_API relint_status relint_server_create(const relint_server_options* options,
                                              relint_server** out);
/* Port 0 picks a free port; *bound_port receives the port in use. */
RELINT_API relint_status relint_server_bind(relint_server* server, const char* host, int port,
                                            int* bound_port);
/* Blocks until relint_server_stop. */
RELINT_API relint_status relint_server_run(relint_server* server);
/* Safe from any thread. */
RELINT_API void relint_server_stop(relint_server* server);
RELINT_API void relint_server_free(relint_server* server);

#ifdef __cplusplus
}
#endif

#endif
