/* C interface to the bnshap engine.
 *
 * Every function returns a bnshap_status. On failure the message of the most
 * recent error on the calling thread is available from bnshap_last_error().
 * Strings returned through `char**` out-parameters are owned by the caller
 * and must be released with bnshap_string_free(). Player masks use bit p for
 * the p-th non-target variable, in the model's declaration order.
 */
#ifndef BNSHAP_H
#define BNSHAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BNSHAP_BUILDING)
#    define BNSHAP_API __declspec(dllexport)
#  else
#    define BNSHAP_API __declspec(dllimport)
#  endif
#else
#  define BNSHAP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bnshap_status {
  BNSHAP_OK = 0,
  BNSHAP_ERR_INPUT = 2,
  BNSHAP_ERR_CAPACITY = 3,
  BNSHAP_ERR_NUMERICAL = 4,
  BNSHAP_ERR_DOMAIN = 5,
  BNSHAP_ERR_INTERNAL = 9
} bnshap_status;

typedef struct bnshap_model bnshap_model;

typedef struct bnshap_shapley_options {
  uint64_t mc_samples;    /* 0 selects exact enumeration */
  uint64_t seed;
  int stratify_mb;        /* non-zero: stratify by the Markov boundary */
} bnshap_shapley_options;

BNSHAP_API const char* bnshap_version(void);
BNSHAP_API const char* bnshap_last_error(void);
BNSHAP_API void bnshap_string_free(char* s);

BNSHAP_API bnshap_status bnshap_model_load_file(const char* path, bnshap_model** out);
BNSHAP_API bnshap_status bnshap_model_load_json(const char* json, bnshap_model** out);
BNSHAP_API void bnshap_model_free(bnshap_model* model);

BNSHAP_API bnshap_status bnshap_model_num_players(const bnshap_model* model, size_t* out);
/* The returned pointer lives as long as the model. */
BNSHAP_API bnshap_status bnshap_model_player_name(const bnshap_model* model, size_t player, const char** out);
BNSHAP_API bnshap_status bnshap_model_value(const bnshap_model* model, uint32_t player_mask, double* out);
BNSHAP_API bnshap_status bnshap_model_markov_boundary(const bnshap_model* model, uint32_t* player_mask);
BNSHAP_API bnshap_status bnshap_model_to_json(const bnshap_model* model, char** out_json);

/* Writes n Shapley values into phi (len must be >= the player count). */
BNSHAP_API bnshap_status bnshap_exact_shapley(const bnshap_model* model, double* phi, size_t len);
BNSHAP_API bnshap_status bnshap_pairwise_diff(const bnshap_model* model, size_t i, size_t j, double* out);

/* Command payloads as JSON documents (the CLI prints these). */
BNSHAP_API bnshap_status bnshap_shapley_json(const bnshap_model* model, const bnshap_shapley_options* options,
                                             char** out_json);
BNSHAP_API bnshap_status bnshap_structure_json(const bnshap_model* model, const char* query,
                                               const char* const* args, size_t nargs, double tol, char** out_json);
/* strategy: "topk", "rfe" or "mb"; k is ignored for "mb". */
BNSHAP_API bnshap_status bnshap_select_json(const bnshap_model* model, const char* strategy, size_t k,
                                            char** out_json);
BNSHAP_API bnshap_status bnshap_verify_theorems_json(const bnshap_model* model, double tol, char** out_json);
BNSHAP_API bnshap_status bnshap_simulate_json(const char* config_json, char** out_json);
BNSHAP_API bnshap_status bnshap_simulate_file_json(const char* config_path, char** out_json);

/* Wraps a payload in the versioned report envelope. */
BNSHAP_API bnshap_status bnshap_envelope_json(const char* command, const char* payload_json, int has_seed,
                                              uint64_t seed, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* BNSHAP_H */
