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

// avexplore: command-line front end. Talks to the library through the C API
// only.
//
//   avexplore explore      --config exp.json [--out DIR] [--seeds 0,1] [--policy curiosity]
//   avexplore evaluate     --config exp.json [...same flags]
//   avexplore export-wav   --config exp.json [...same flags]
//   avexplore validate-dsp
//
// Exit status: 0 success, 1 validation error, 2 runtime error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "avx/avx.h"

namespace {

int fail(avx_status st) {
  std::fprintf(stderr, "avexplore: %s\n", avx_last_error());
  return st == AVX_ERR_VALIDATION ? 1 : 2;
}

void print_line(const char* line, void*) { std::printf("%s\n", line); }

struct RunFlags {
  std::string config;
  std::string out;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> policies;
  std::size_t workers = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->required();
  cmd->add_option("--out", f.out, "Output root (overrides $AVX_OUTPUT_ROOT and the config)");
  cmd->add_option("--seeds", f.seeds, "Comma-separated seeds (overrides the config)")->delimiter(',');
  cmd->add_option("--policy", f.policies, "random, cycling, curiosity; comma-separated")
      ->delimiter(',');
  cmd->add_option("--workers", f.workers, "Parallel runs (0: one per hardware thread)");
}

using Command = avx_status (*)(const avx_experiment*, const avx_run_options*, avx_line_fn, void*);

int run_command(Command cmd, const RunFlags& f) {
  avx_experiment* exp = nullptr;
  if (avx_status st = avx_experiment_load(f.config.c_str(), &exp); st != AVX_OK) return fail(st);
  std::string policies;
  for (const auto& p : f.policies) policies += (policies.empty() ? "" : ",") + p;
  avx_run_options opts{};
  opts.out_dir = f.out.empty() ? nullptr : f.out.c_str();
  opts.seeds = f.seeds.empty() ? nullptr : f.seeds.data();
  opts.seed_count = f.seeds.size();
  opts.policies = policies.empty() ? nullptr : policies.c_str();
  opts.workers = f.workers;
  const avx_status st = cmd(exp, &opts, print_line, nullptr);
  avx_experiment_free(exp);
  return st == AVX_OK ? 0 : fail(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audiovisual exploration experiments"};
  app.set_version_flag("--version", avx_version());
  app.require_subcommand(1);

  RunFlags explore_flags, evaluate_flags, export_flags;
  auto* explore = app.add_subcommand("explore", "Run exploration and write stores and step logs");
  add_run_flags(explore, explore_flags);
  auto* evaluate = app.add_subcommand("evaluate", "Score stored runs and write task CSVs");
  add_run_flags(evaluate, evaluate_flags);
  auto* export_wav = app.add_subcommand("export-wav", "Write the stored clips as WAV files");
  add_run_flags(export_wav, export_flags);

  std::string fault;
  auto* dsp = app.add_subcommand("validate-dsp", "Check the MFCC/MCD pipeline against references");
  dsp->add_option("--inject-fault", fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*explore) return run_command(avx_cmd_explore, explore_flags);
  if (*evaluate) return run_command(avx_cmd_evaluate, evaluate_flags);
  if (*export_wav) return run_command(avx_cmd_export_wav, export_flags);

  const auto start = std::chrono::steady_clock::now();
  int passed = 0;
  const avx_status st =
      avx_validate_dsp(fault.empty() ? nullptr : fault.c_str(), print_line, nullptr, &passed);
  if (st != AVX_OK) return fail(st);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s (%.2f s)\n", passed ? "all checks passed" : "DSP checks FAILED", secs);
  return passed ? 0 : 2;
}
