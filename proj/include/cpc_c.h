// Copyright 2026 The cpcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the cpcsim naming-game simulator.
 *
 * Every function returns a cpc_status. On failure the message is available
 * from cpc_last_error() on the same thread until the next call. Strings
 * handed out through char** parameters are owned by the caller and released
 * with cpc_string_free(). */
#ifndef CPC_C_H_
#define CPC_C_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CPC_API __declspec(dllexport)
#else
#define CPC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cpc_status {
  CPC_OK = 0,
  CPC_ERR_INVALID_ARGUMENT = 1,
  CPC_ERR_PARSE = 2,
  CPC_ERR_VALIDATION = 3,
  CPC_ERR_IO = 4,
  CPC_ERR_CORRUPT = 5,
  CPC_ERR_INCOMPATIBLE = 6,
  CPC_ERR_INTERNAL = 7,
  /* A suite ran to completion but at least one criterion failed. */
  CPC_ERR_CRITERIA_FAILED = 8,
  /* An experiment finished but one or more seeds failed. */
  CPC_ERR_PARTIAL_FAILURE = 9
} cpc_status;

typedef struct cpc_config cpc_config;
typedef struct cpc_sim cpc_sim;

CPC_API const char* cpc_version(void);
CPC_API const char* cpc_last_error(void);
/* Stable snake_case name for a status, e.g. "parse_error". */
CPC_API const char* cpc_status_name(cpc_status status);
CPC_API void cpc_string_free(char* s);

CPC_API cpc_status cpc_config_load(const char* path, cpc_config** out);
CPC_API cpc_status cpc_config_from_json(const char* json, cpc_config** out);
CPC_API cpc_status cpc_config_to_json(const cpc_config* config, char** out);
CPC_API cpc_status cpc_config_set_output_dir(cpc_config* config, const char* dir);
CPC_API cpc_status cpc_config_set_seeds(cpc_config* config, const uint64_t* seeds,
                                        size_t count);
CPC_API void cpc_config_free(cpc_config* config);

/* Runs every seed; *summary receives the summary document even on
 * CPC_ERR_PARTIAL_FAILURE. */
CPC_API cpc_status cpc_run_experiment(const cpc_config* config, char** summary);
/* name: oracle-validation, baseline-comparison or plasticity. *report is set
 * whenever the suite ran, including on CPC_ERR_CRITERIA_FAILED. */
CPC_API cpc_status cpc_run_suite(const char* name, const char* out_dir, char** report);
/* checkpoint may be NULL; a checkpoint.json next to the transcript is then
 * used when present. */
CPC_API cpc_status cpc_replay_transcript(const char* transcript, const char* checkpoint,
                                         char** result);
/* total_rounds <= 0 keeps the checkpoint's configured round count. */
CPC_API cpc_status cpc_resume(const char* checkpoint, const char* out_dir, int64_t total_rounds,
                              char** result);

/* In-memory simulation of a single seed. */
CPC_API cpc_status cpc_sim_create(const cpc_config* config, uint64_t seed, cpc_sim** out);
CPC_API cpc_status cpc_sim_step(cpc_sim* sim, int64_t rounds);
CPC_API cpc_status cpc_sim_round(const cpc_sim* sim, int64_t* round);
/* Copies up to capacity signs; *count receives the number of objects. */
CPC_API cpc_status cpc_sim_signs(const cpc_sim* sim, int32_t* buffer, size_t capacity,
                                 size_t* count);
/* Total of the most recent round; NaN before the first step. */
CPC_API cpc_status cpc_sim_free_energy(const cpc_sim* sim, double* total);
CPC_API cpc_status cpc_sim_save_checkpoint(const cpc_sim* sim, const char* path);
CPC_API cpc_status cpc_sim_load_checkpoint(const char* path, cpc_sim** out);
CPC_API void cpc_sim_free(cpc_sim* sim);

#ifdef __cplusplus
}
#endif

#endif /* CPC_C_H_ */
