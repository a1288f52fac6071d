/* Copyright 2026 The avexplore Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

/* C interface to the avexplore library.
 *
 * Objects are opaque handles created by avx_*_load / avx_synthesize and
 * released with the matching avx_*_free. Every fallible call returns an
 * avx_status; on failure avx_last_error() describes the problem. The error
 * string is per-thread and valid until the next failing call on that thread.
 */
#ifndef AVX_AVX_H_
#define AVX_AVX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(AVX_BUILDING_LIBRARY)
#define AVX_API __attribute__((visibility("default")))
#else
#define AVX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  AVX_OK = 0,
  AVX_ERR_VALIDATION = 1, /* bad config, ids, arguments or missing inputs */
  AVX_ERR_RUNTIME = 2,    /* I/O, numerical or internal failure */
} avx_status;

typedef struct avx_world avx_world;
typedef struct avx_waveform avx_waveform;
typedef struct avx_store avx_store;
typedef struct avx_experiment avx_experiment;

/* Receives one line of output (artifact path, check result, warning). */
typedef void (*avx_line_fn)(const char* line, void* user);

AVX_API const char* avx_version(void);
AVX_API const char* avx_last_error(void);

/* Route library warnings (default: stderr). Pass NULL to silence them. */
AVX_API void avx_set_warning_handler(avx_line_fn fn, void* user);

/* Scenario files (JSON). */
AVX_API avx_status avx_world_load(const char* path, avx_world** out);
AVX_API avx_status avx_world_from_json(const char* json, avx_world** out);
AVX_API avx_status avx_world_scene_count(const avx_world* world, size_t* out);
AVX_API void avx_world_free(avx_world* world);

/* One raw impact recording. */
AVX_API avx_status avx_synthesize(const avx_world* world, const char* scene, const char* object,
                                  const char* part, double u, double energy, double noise_level,
                                  uint64_t seed, avx_waveform** out);
/* Onset-aligned, level-normalized 300 ms clip of `in`. */
AVX_API avx_status avx_waveform_clip(const avx_waveform* in, avx_waveform** out);
/* Borrowed view of the samples; valid while the waveform lives. */
AVX_API avx_status avx_waveform_samples(const avx_waveform* w, const double** data, size_t* count,
                                        int* sample_rate_hz);
AVX_API avx_status avx_waveform_write_wav(const avx_waveform* w, const char* path);
AVX_API void avx_waveform_free(avx_waveform* w);

/* Mel-cepstral distortion between the MFCCs of two clips (c0 excluded). */
AVX_API avx_status avx_mcd(const avx_waveform* a, const avx_waveform* b, double* out);

/* Stores written by the explore command. */
AVX_API avx_status avx_store_load(const char* path, avx_store** out);
AVX_API avx_status avx_store_size(const avx_store* store, size_t* out);
AVX_API avx_status avx_store_config_hash(const avx_store* store, uint64_t* out);
/* Strings are borrowed from the store. */
AVX_API avx_status avx_store_record_point(const avx_store* store, size_t index, const char** scene,
                                          const char** object, const char** part, double* u);
AVX_API avx_status avx_store_record_waveform(const avx_store* store, size_t index,
                                             avx_waveform** out);
AVX_API void avx_store_free(avx_store* store);

/* Experiment configs and commands. */
AVX_API avx_status avx_experiment_load(const char* path, avx_experiment** out);
AVX_API avx_status avx_experiment_config_hash(const avx_experiment* exp, uint64_t* out);
AVX_API void avx_experiment_free(avx_experiment* exp);

typedef struct {
  const char* out_dir;    /* NULL: $AVX_OUTPUT_ROOT, then the config's output_dir */
  const uint64_t* seeds;  /* NULL: the config's seeds */
  size_t seed_count;
  const char* policies;   /* comma-separated; NULL: the config's policies */
  size_t workers;         /* 0: one per hardware thread */
} avx_run_options;

/* `on_artifact` receives each path written; it may be NULL. */
AVX_API avx_status avx_cmd_explore(const avx_experiment* exp, const avx_run_options* opts,
                                   avx_line_fn on_artifact, void* user);
AVX_API avx_status avx_cmd_evaluate(const avx_experiment* exp, const avx_run_options* opts,
                                    avx_line_fn on_artifact, void* user);
AVX_API avx_status avx_cmd_export_wav(const avx_experiment* exp, const avx_run_options* opts,
                                      avx_line_fn on_artifact, void* user);

/* Runs the DSP self-checks and reports one line per check. `fault` injects a
 * named defect for testing the checks themselves ("filterbank"); pass NULL
 * for a normal run. *all_passed is set to 1 or 0. */
AVX_API avx_status avx_validate_dsp(const char* fault, avx_line_fn on_check, void* user,
                                    int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* AVX_AVX_H_ */
