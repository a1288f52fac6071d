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

#include "avx/avx.h"

#include <chrono>
#include <cstdio>
#include <exception>
#include <memory>
#include <sstream>
#include <string>

#include "avx/dsp_reference.hpp"
#include "avx/harness.hpp"

struct avx_world {
  avx::World world;
};
struct avx_waveform {
  avx::Waveform wave;
};
struct avx_store {
  avx::AVStore store;
  avx::StoreMetadata meta;
};
struct avx_experiment {
  avx::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

avx_status set_error(avx_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename F>
avx_status guarded(F&& f) {
  try {
    f();
    return AVX_OK;
  } catch (const avx::ValidationError& e) {
    return set_error(AVX_ERR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return set_error(AVX_ERR_RUNTIME, e.what());
  } catch (...) {
    return set_error(AVX_ERR_RUNTIME, "unknown error");
  }
}

#define AVX_REQUIRE(cond)                                                   \
  do {                                                                      \
    if (!(cond)) return set_error(AVX_ERR_VALIDATION, "null argument: " #cond); \
  } while (0)

avx::RunOptions run_options(const avx_run_options* opts, avx_line_fn fn, void* user) {
  avx::RunOptions o;
  if (fn) o.report = [fn, user](std::string_view line) { fn(std::string(line).c_str(), user); };
  if (!opts) return o;
  if (opts->out_dir) o.out = opts->out_dir;
  if (opts->seeds) {
    if (opts->seed_count == 0) throw avx::ValidationError("--seeds: empty list");
    o.seeds = std::vector<std::uint64_t>(opts->seeds, opts->seeds + opts->seed_count);
  }
  if (opts->policies) {
    std::vector<avx::PolicyKind> policies;
    std::stringstream ss(opts->policies);
    for (std::string name; std::getline(ss, name, ',');)
      if (!name.empty()) policies.push_back(avx::parse_policy(name));
    if (policies.empty()) throw avx::ValidationError("--policy: empty list");
    o.policies = std::move(policies);
  }
  o.workers = opts->workers;
  return o;
}

}  // namespace

extern "C" {

const char* avx_version(void) { return "0.3.0"; }

const char* avx_last_error(void) { return g_last_error.c_str(); }

void avx_set_warning_handler(avx_line_fn fn, void* user) {
  if (!fn) {
    avx::set_warning_sink(nullptr);
    return;
  }
  avx::set_warning_sink([fn, user](std::string_view m) { fn(std::string(m).c_str(), user); });
}

avx_status avx_world_load(const char* path, avx_world** out) {
  AVX_REQUIRE(path && out);
  return guarded([&] {
    auto w = std::make_unique<avx_world>();
    w->world = avx::generate_world(avx::load_scenario(path));
    *out = w.release();
  });
}

avx_status avx_world_from_json(const char* json, avx_world** out) {
  AVX_REQUIRE(json && out);
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw avx::ValidationError(std::string("scenario: ") + e.what());
    }
    auto w = std::make_unique<avx_world>();
    w->world = avx::generate_world(avx::scenario_from_json(j));
    *out = w.release();
  });
}

avx_status avx_world_scene_count(const avx_world* world, size_t* out) {
  AVX_REQUIRE(world && out);
  *out = world->world.scenes.size();
  return AVX_OK;
}

void avx_world_free(avx_world* world) { delete world; }

avx_status avx_synthesize(const avx_world* world, const char* scene, const char* object,
                          const char* part, double u, double energy, double noise_level,
                          uint64_t seed, avx_waveform** out) {
  AVX_REQUIRE(world && scene && object && part && out);
  return guarded([&] {
    if (!(energy > 0.0)) throw avx::ValidationError("energy must be positive");
    if (!(noise_level >= 0.0)) throw avx::ValidationError("noise_level must be >= 0");
    auto w = std::make_unique<avx_waveform>();
    w->wave = avx::synthesize_impact({scene, object, part, u}, world->world,
                                     {energy, noise_level}, seed);
    *out = w.release();
  });
}

avx_status avx_waveform_clip(const avx_waveform* in, avx_waveform** out) {
  AVX_REQUIRE(in && out);
  return guarded([&] {
    auto w = std::make_unique<avx_waveform>();
    w->wave = avx::normalize_and_clip(in->wave);
    *out = w.release();
  });
}

avx_status avx_waveform_samples(const avx_waveform* w, const double** data, size_t* count,
                                int* sample_rate_hz) {
  AVX_REQUIRE(w && data && count);
  *data = w->wave.samples.data();
  *count = w->wave.samples.size();
  if (sample_rate_hz) *sample_rate_hz = w->wave.sample_rate_hz;
  return AVX_OK;
}

avx_status avx_waveform_write_wav(const avx_waveform* w, const char* path) {
  AVX_REQUIRE(w && path);
  return guarded([&] { avx::write_wav(w->wave, path); });
}

void avx_waveform_free(avx_waveform* w) { delete w; }

avx_status avx_mcd(const avx_waveform* a, const avx_waveform* b, double* out) {
  AVX_REQUIRE(a && b && out);
  return guarded([&] { *out = avx::mcd(avx::compute_mfcc(a->wave), avx::compute_mfcc(b->wave)); });
}

avx_status avx_store_load(const char* path, avx_store** out) {
  AVX_REQUIRE(path && out);
  return guarded([&] {
    auto s = std::make_unique<avx_store>();
    s->store = avx::AVStore::load(path, &s->meta);
    *out = s.release();
  });
}

avx_status avx_store_size(const avx_store* store, size_t* out) {
  AVX_REQUIRE(store && out);
  *out = store->store.size();
  return AVX_OK;
}

avx_status avx_store_config_hash(const avx_store* store, uint64_t* out) {
  AVX_REQUIRE(store && out);
  *out = store->meta.config_hash;
  return AVX_OK;
}

avx_status avx_store_record_point(const avx_store* store, size_t index, const char** scene,
                                  const char** object, const char** part, double* u) {
  AVX_REQUIRE(store);
  if (index >= store->store.size())
    return set_error(AVX_ERR_VALIDATION, "record index " + std::to_string(index) + " out of range");
  const auto& p = store->store[index].point;
  if (scene) *scene = p.scene_id.c_str();
  if (object) *object = p.object_id.c_str();
  if (part) *part = p.part_id.c_str();
  if (u) *u = p.u;
  return AVX_OK;
}

avx_status avx_store_record_waveform(const avx_store* store, size_t index, avx_waveform** out) {
  AVX_REQUIRE(store && out);
  if (index >= store->store.size())
    return set_error(AVX_ERR_VALIDATION, "record index " + std::to_string(index) + " out of range");
  return guarded([&] {
    auto w = std::make_unique<avx_waveform>();
    w->wave = *store->store[index].waveform;
    *out = w.release();
  });
}

void avx_store_free(avx_store* store) { delete store; }

avx_status avx_experiment_load(const char* path, avx_experiment** out) {
  AVX_REQUIRE(path && out);
  return guarded([&] {
    auto e = std::make_unique<avx_experiment>();
    e->cfg = avx::load_experiment(path);
    *out = e.release();
  });
}

avx_status avx_experiment_config_hash(const avx_experiment* exp, uint64_t* out) {
  AVX_REQUIRE(exp && out);
  return guarded([&] { *out = avx::config_hash(exp->cfg); });
}

void avx_experiment_free(avx_experiment* exp) { delete exp; }

avx_status avx_cmd_explore(const avx_experiment* exp, const avx_run_options* opts,
                           avx_line_fn on_artifact, void* user) {
  AVX_REQUIRE(exp);
  return guarded([&] { avx::cmd_explore(exp->cfg, run_options(opts, on_artifact, user)); });
}

avx_status avx_cmd_evaluate(const avx_experiment* exp, const avx_run_options* opts,
                            avx_line_fn on_artifact, void* user) {
  AVX_REQUIRE(exp);
  return guarded([&] { avx::cmd_evaluate(exp->cfg, run_options(opts, on_artifact, user)); });
}

avx_status avx_cmd_export_wav(const avx_experiment* exp, const avx_run_options* opts,
                              avx_line_fn on_artifact, void* user) {
  AVX_REQUIRE(exp);
  return guarded([&] { avx::cmd_export_wav(exp->cfg, run_options(opts, on_artifact, user)); });
}

avx_status avx_validate_dsp(const char* fault, avx_line_fn on_check, void* user, int* all_passed) {
  return guarded([&] {
    const auto checks = avx::validate_dsp(fault ? std::string_view(fault) : std::string_view{});
    bool ok = true;
    for (const auto& c : checks) {
      ok = ok && c.passed;
      if (!on_check) continue;
      char line[512];
      std::snprintf(line, sizeof(line), "%-22s %s  error=%.3g tolerance=%.3g%s%s", c.name.c_str(),
                    c.passed ? "PASS" : "FAIL", c.error, c.tolerance,
                    c.detail.empty() ? "" : "  ", c.detail.c_str());
      on_check(line, user);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
