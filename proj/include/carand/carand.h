// Copyright 2026 The carand Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the carand library.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns a carand_status;
 * on failure carand_last_error() describes the problem (thread-local, valid
 * until the next failing call on the same thread). */
#ifndef CARAND_CARAND_H
#define CARAND_CARAND_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CARAND_BUILDING_LIBRARY)
#    define CARAND_API __declspec(dllexport)
#  else
#    define CARAND_API __declspec(dllimport)
#  endif
#else
#  define CARAND_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum carand_status {
  CARAND_OK = 0,
  CARAND_ERR_INVALID_ARGUMENT = 1,
  CARAND_ERR_CONFIG = 2,
  CARAND_ERR_GUARD = 3,
  CARAND_ERR_IO = 4,
  CARAND_ERR_INTERNAL = 5
} carand_status;

typedef struct carand_config carand_config;
typedef struct carand_text carand_text;
typedef struct carand_trial carand_trial;

CARAND_API const char* carand_version(void);
CARAND_API const char* carand_last_error(void);
CARAND_API const char* carand_status_name(carand_status status);

/* Text results. */
CARAND_API const char* carand_text_data(const carand_text* text);
CARAND_API size_t carand_text_size(const carand_text* text);
CARAND_API void carand_text_free(carand_text* text);

/* Configuration. */
CARAND_API carand_status carand_config_load_file(const char* path, carand_config** out);
CARAND_API carand_status carand_config_load_string(const char* json, carand_config** out);
CARAND_API carand_status carand_config_from_preset(const char* name, carand_config** out);
CARAND_API void carand_config_free(carand_config* config);
CARAND_API carand_status carand_config_set_seed(carand_config* config, uint64_t seed);
CARAND_API carand_status carand_config_set_workers(carand_config* config, uint32_t workers);
CARAND_API carand_status carand_config_set_out_dir(carand_config* config, const char* dir);
CARAND_API carand_status carand_config_out_dir(const carand_config* config, carand_text** out);
CARAND_API carand_status carand_config_serialize(const carand_config* config, carand_text** out);
/* Newline-separated preset names. */
CARAND_API carand_status carand_preset_names(carand_text** out);

/* Subcommands. Text outputs are what the CLI prints. */
CARAND_API carand_status carand_classify(const carand_config* config, carand_text** csv);
CARAND_API carand_status carand_oracle(const carand_config* config, int64_t n_max,
                                       const char* stat, double r, carand_text** csv);
CARAND_API carand_status carand_simulate(const carand_config* config, const char* out_dir,
                                         carand_text** summary);
/* *passed is set to 1 when every check passed, 0 otherwise. */
CARAND_API carand_status carand_verify(const carand_config* config, const char* out_dir,
                                       int* passed, carand_text** table);

/* Step-by-step trials (two-arm or multi-arm, per the config's policy). */
CARAND_API carand_status carand_trial_new(const carand_config* config, uint64_t replication_id,
                                          carand_trial** out);
CARAND_API void carand_trial_free(carand_trial* trial);
/* Enrolls one patient; reports the stratum (flat, 0-based) and the
 * treatment (1-based). Either output pointer may be NULL. */
CARAND_API carand_status carand_trial_step(carand_trial* trial, size_t* stratum,
                                           int* treatment);
CARAND_API int64_t carand_trial_patients(const carand_trial* trial);
CARAND_API size_t carand_trial_strata(const carand_trial* trial);
/* Imbalance within `stratum` for `treatment` (1-based; two-arm: treatment
 * is ignored and the value is D(k) = arm 1 minus arm 2). */
CARAND_API carand_status carand_trial_stratum_imbalance(const carand_trial* trial,
                                                        size_t stratum, int treatment,
                                                        double* out);
CARAND_API carand_status carand_trial_overall_imbalance(const carand_trial* trial,
                                                        int treatment, double* out);

#ifdef __cplusplus
}
#endif

#endif /* CARAND_CARAND_H */
