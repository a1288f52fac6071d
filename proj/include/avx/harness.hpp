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

#ifndef AVX_HARNESS_HPP_
#define AVX_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avx/tasks.hpp"
#include "json.hpp"

namespace avx {

struct TaskToggles {
  bool audio_pred = true;
  bool material = true;
  bool music = true;
  bool activity = true;
};

struct InstrumentTaskConfig {
  std::size_t budget = 32;
  std::size_t demos = 50;
  double noise_level = 0.01;
};

struct ActivityTaskConfig {
  std::size_t budget = 35;
  std::size_t trials = 100;
  double noise_level = 0.02;
};

// One experiment file. Scenario paths are resolved relative to the file that
// names them and parsed eagerly, so a loaded config is self-contained.
struct ExperimentConfig {
  std::vector<std::filesystem::path> scenario_paths;
  std::vector<ScenarioSpec> scenarios;
  std::vector<PolicyKind> policies{PolicyKind::random, PolicyKind::cycling, PolicyKind::curiosity};
  std::size_t budget_per_scene = 40;
  std::size_t snapshot_interval = 5;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "runs";
  TaskToggles tasks;
  ExplorationConfig exploration;
  std::size_t pretrain_pairs = 300;
  MaterialEvalConfig material;
  InstrumentTaskConfig music;
  ActivityTaskConfig activity;
};

void validate(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const nlohmann::json& j,
                                      const std::filesystem::path& base_dir);
ExperimentConfig load_experiment(const std::filesystem::path& path);

// Canonical form used for hashing: scenarios inlined, seeds and output
// location left out (they select runs, they do not change what a run does).
nlohmann::json experiment_to_json(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

inline constexpr const char* kOutputRootEnv = "AVX_OUTPUT_ROOT";

struct RunOptions {
  std::optional<std::filesystem::path> out;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::vector<PolicyKind>> policies;
  std::size_t workers = 0;  // 0: hardware concurrency
  // Receives one line per artifact written.
  std::function<void(std::string_view)> report;
};

// --out, then $AVX_OUTPUT_ROOT, then the config's output_dir.
std::filesystem::path output_root(const ExperimentConfig& cfg, const RunOptions& opts);

std::filesystem::path run_directory(const std::filesystem::path& root, std::string_view env,
                                    PolicyKind policy, std::uint64_t seed);

// Writes <root>/<env>/<policy>/seed_<s>/{store.avx,steps.csv} for every
// (environment, policy, seed). Returns the files written.
std::vector<std::filesystem::path> cmd_explore(const ExperimentConfig& cfg,
                                               const RunOptions& opts);

// Reads exploration artifacts and writes the enabled task CSVs plus
// summary.json under <root>. Throws ValidationError listing missing stores.
std::vector<std::filesystem::path> cmd_evaluate(const ExperimentConfig& cfg,
                                                const RunOptions& opts);

// Writes every stored clip of every run as 16-bit WAV under <run>/wav/.
std::vector<std::filesystem::path> cmd_export_wav(const ExperimentConfig& cfg,
                                                  const RunOptions& opts);

// Format helpers shared by the CSV writers.
std::string format_double(double v);
std::string config_hash_line(std::uint64_t hash);

}  // namespace avx

#endif  // AVX_HARNESS_HPP_
