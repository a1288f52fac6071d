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

#include "avx/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "avx/fft.hpp"

namespace avx {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ValidationError("experiment." + field + ": " + msg);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where.empty() ? "root" : where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

std::pair<double, double> interval(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) fail(field, "expected [lo, hi]");
  const double lo = j[0].get<double>(), hi = j[1].get<double>();
  if (!(lo < hi)) fail(field, "lo must be below hi");
  return {lo, hi};
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.scenarios.empty()) fail("scenarios", "at least one scenario is required");
  std::set<std::string> envs;
  for (const auto& s : cfg.scenarios)
    if (!envs.insert(s.environment_name).second)
      fail("scenarios", "environment '" + s.environment_name + "' appears twice");
  if (cfg.policies.empty()) fail("policies", "must not be empty");
  if (cfg.seeds.empty()) fail("seeds", "must not be empty");
  if (cfg.budget_per_scene < 1) fail("budget_per_scene", "must be >= 1");
  if (cfg.snapshot_interval < 1) fail("snapshot_interval", "must be >= 1");
  const auto& c = cfg.exploration.candidates;
  if (!(c.u_min >= 0.0 && c.u_max <= 1.0 && c.u_min < c.u_max))
    fail("exploration.u_range", "must satisfy 0 <= lo < hi <= 1");
  if (c.reserved && (c.reserved->first < c.u_min || c.reserved->second > c.u_max))
    fail("exploration.test_u_interval", "must lie inside u_range");
  if (cfg.exploration.candidates_per_step < 1) fail("exploration.candidates_per_step", "must be >= 1");
  if (cfg.exploration.strike.noise_level < 0.0) fail("exploration.noise_level", "must be >= 0");
  if (cfg.exploration.visual.noise_sigma < 0.0) fail("exploration.visual_noise", "must be >= 0");
  const auto& m = cfg.exploration.mfcc;
  if (m.coefficients < 2 || m.coefficients > m.bands) fail("dsp.coefficients", "must be in [2, bands]");
  if (!is_power_of_two(m.fft_size)) fail("dsp.fft_size", "must be a power of two");
  if (m.fft_size < frame_length(m, 16000)) fail("dsp.fft_size", "shorter than one frame");
  if (!(m.f_min_hz >= 0.0 && m.f_min_hz < m.f_max_hz && m.f_max_hz <= 8000.0))
    fail("dsp.f_max_hz", "band edges must satisfy 0 <= f_min < f_max <= 8000");
  if (!(m.log_floor > 0.0)) fail("dsp.log_floor", "must be positive");
  if (cfg.pretrain_pairs < 6) fail("pretrain.pairs", "need at least 6 pairs");
  if (cfg.material.runs < 1) fail("material.runs", "must be >= 1");
  if (cfg.material.hyper.hidden < 1 || cfg.material.hyper.epochs < 1 || cfg.material.hyper.batch < 1)
    fail("material", "hidden, epochs and batch must be >= 1");
  if (cfg.music.budget < 1 || cfg.activity.budget < 1) fail("music.budget", "budgets must be >= 1");
}

ExperimentConfig experiment_from_json(const json& j, const fs::path& base_dir) {
  ExperimentConfig cfg;
  check_keys(j, "", {"scenarios", "policies", "budget_per_scene", "snapshot_interval", "seeds",
                     "output_dir", "tasks", "exploration", "dsp", "pretrain", "material", "music",
                     "activity"});
  try {
    if (!j.contains("scenarios")) fail("scenarios", "required");
    for (const auto& s : j["scenarios"]) {
      fs::path p = s.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      if (!fs::exists(p)) fail("scenarios", "file not found: " + p.string());
      cfg.scenario_paths.push_back(p);
      cfg.scenarios.push_back(load_scenario(p));
    }
    if (j.contains("policies")) {
      cfg.policies.clear();
      for (const auto& p : j["policies"]) cfg.policies.push_back(parse_policy(p.get<std::string>()));
    }
    cfg.budget_per_scene = j.value("budget_per_scene", cfg.budget_per_scene);
    cfg.snapshot_interval = j.value("snapshot_interval", cfg.snapshot_interval);
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("output_dir")) {
      fs::path out = j["output_dir"].get<std::string>();
      cfg.output_dir = out.is_relative() ? base_dir / out : out;
    }
    if (j.contains("tasks")) {
      const auto& t = j["tasks"];
      check_keys(t, "tasks", {"audio_pred", "material", "music", "activity"});
      cfg.tasks.audio_pred = t.value("audio_pred", cfg.tasks.audio_pred);
      cfg.tasks.material = t.value("material", cfg.tasks.material);
      cfg.tasks.music = t.value("music", cfg.tasks.music);
      cfg.tasks.activity = t.value("activity", cfg.tasks.activity);
    }
    auto& ex = cfg.exploration;
    if (j.contains("exploration")) {
      const auto& e = j["exploration"];
      check_keys(e, "exploration",
                 {"candidates_per_step", "visual_noise", "noise_level", "u_range", "test_u_interval"});
      ex.candidates_per_step = e.value("candidates_per_step", ex.candidates_per_step);
      ex.visual.noise_sigma = e.value("visual_noise", ex.visual.noise_sigma);
      ex.strike.noise_level = e.value("noise_level", ex.strike.noise_level);
      if (e.contains("u_range")) {
        const auto [lo, hi] = interval(e["u_range"], "exploration.u_range");
        ex.candidates.u_min = lo;
        ex.candidates.u_max = hi;
      }
      if (e.contains("test_u_interval")) {
        if (e["test_u_interval"].is_null())
          fail("exploration.test_u_interval", "a held-out interval is required");
        ex.candidates.reserved = interval(e["test_u_interval"], "exploration.test_u_interval");
      }
    }
    if (j.contains("dsp")) {
      const auto& d = j["dsp"];
      check_keys(d, "dsp", {"coefficients", "bands", "frame_s", "hop_s", "f_min_hz", "f_max_hz",
                            "log_floor", "fft_size"});
      auto& m = ex.mfcc;
      m.coefficients = d.value("coefficients", m.coefficients);
      m.bands = d.value("bands", m.bands);
      m.frame_s = d.value("frame_s", m.frame_s);
      m.hop_s = d.value("hop_s", m.hop_s);
      m.f_min_hz = d.value("f_min_hz", m.f_min_hz);
      m.f_max_hz = d.value("f_max_hz", m.f_max_hz);
      m.log_floor = d.value("log_floor", m.log_floor);
      m.fft_size = d.value("fft_size", m.fft_size);
    }
    if (j.contains("pretrain")) {
      check_keys(j["pretrain"], "pretrain", {"pairs"});
      cfg.pretrain_pairs = j["pretrain"].value("pairs", cfg.pretrain_pairs);
    }
    if (j.contains("material")) {
      const auto& m = j["material"];
      check_keys(m, "material", {"runs", "checkpoints", "hidden", "learning_rate", "momentum",
                                 "epochs", "batch", "weight_decay"});
      auto& h = cfg.material.hyper;
      cfg.material.runs = m.value("runs", cfg.material.runs);
      cfg.material.checkpoints = m.value("checkpoints", cfg.material.checkpoints);
      h.hidden = m.value("hidden", h.hidden);
      h.learning_rate = m.value("learning_rate", h.learning_rate);
      h.momentum = m.value("momentum", h.momentum);
      h.epochs = m.value("epochs", h.epochs);
      h.batch = m.value("batch", h.batch);
      h.weight_decay = m.value("weight_decay", h.weight_decay);
    }
    if (j.contains("music")) {
      const auto& m = j["music"];
      check_keys(m, "music", {"budget", "demos", "noise_level"});
      cfg.music.budget = m.value("budget", cfg.music.budget);
      cfg.music.demos = m.value("demos", cfg.music.demos);
      cfg.music.noise_level = m.value("noise_level", cfg.music.noise_level);
    }
    if (j.contains("activity")) {
      const auto& a = j["activity"];
      check_keys(a, "activity", {"budget", "trials", "noise_level"});
      cfg.activity.budget = a.value("budget", cfg.activity.budget);
      cfg.activity.trials = a.value("trials", cfg.activity.trials);
      cfg.activity.noise_level = a.value("noise_level", cfg.activity.noise_level);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("experiment: malformed field: ") + e.what());
  }
  cfg.exploration.budget_per_scene = cfg.budget_per_scene;
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path.string() + ": " + e.what());
  }
  return experiment_from_json(j, path.parent_path());
}

json experiment_to_json(const ExperimentConfig& cfg) {
  json j;
  json scenarios = json::array();
  for (const auto& s : cfg.scenarios) scenarios.push_back(scenario_to_json(s));
  j["scenarios"] = std::move(scenarios);
  json policies = json::array();
  for (auto p : cfg.policies) policies.push_back(std::string(to_string(p)));
  j["policies"] = std::move(policies);
  j["budget_per_scene"] = cfg.budget_per_scene;
  j["snapshot_interval"] = cfg.snapshot_interval;
  j["tasks"] = {{"audio_pred", cfg.tasks.audio_pred},
                {"material", cfg.tasks.material},
                {"music", cfg.tasks.music},
                {"activity", cfg.tasks.activity}};
  const auto& ex = cfg.exploration;
  j["exploration"] = {{"candidates_per_step", ex.candidates_per_step},
                      {"visual_noise", ex.visual.noise_sigma},
                      {"noise_level", ex.strike.noise_level},
                      {"u_range", {ex.candidates.u_min, ex.candidates.u_max}}};
  if (ex.candidates.reserved)
    j["exploration"]["test_u_interval"] = {ex.candidates.reserved->first,
                                           ex.candidates.reserved->second};
  const auto& m = ex.mfcc;
  j["dsp"] = {{"coefficients", m.coefficients}, {"bands", m.bands},
              {"frame_s", m.frame_s},           {"hop_s", m.hop_s},
              {"f_min_hz", m.f_min_hz},         {"f_max_hz", m.f_max_hz},
              {"log_floor", m.log_floor},       {"fft_size", m.fft_size}};
  j["pretrain"] = {{"pairs", cfg.pretrain_pairs}};
  const auto& h = cfg.material.hyper;
  j["material"] = {{"runs", cfg.material.runs},   {"checkpoints", cfg.material.checkpoints},
                   {"hidden", h.hidden},          {"learning_rate", h.learning_rate},
                   {"momentum", h.momentum},      {"epochs", h.epochs},
                   {"batch", h.batch},            {"weight_decay", h.weight_decay}};
  j["music"] = {{"budget", cfg.music.budget},
                {"demos", cfg.music.demos},
                {"noise_level", cfg.music.noise_level}};
  j["activity"] = {{"budget", cfg.activity.budget},
                   {"trials", cfg.activity.trials},
                   {"noise_level", cfg.activity.noise_level}};
  return j;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a(experiment_to_json(cfg).dump());
}

fs::path output_root(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.out) return *opts.out;
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return cfg.output_dir;
}

fs::path run_directory(const fs::path& root, std::string_view env, PolicyKind policy,
                       std::uint64_t seed) {
  return root / std::string(env) / std::string(to_string(policy)) /
         ("seed_" + std::to_string(seed));
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string config_hash_line(std::uint64_t hash) { return "# config_hash: " + hex64(hash) + "\n"; }

namespace {

struct Job {
  std::size_t env;
  PolicyKind policy;
  std::uint64_t seed;
};

std::vector<std::uint64_t> seeds_of(const ExperimentConfig& cfg, const RunOptions& opts) {
  auto seeds = opts.seeds.value_or(cfg.seeds);
  if (seeds.empty()) throw ValidationError("experiment.seeds: must not be empty");
  return seeds;
}

std::vector<Job> jobs_of(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto policies = opts.policies.value_or(cfg.policies);
  if (policies.empty()) throw ValidationError("experiment.policies: must not be empty");
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < cfg.scenarios.size(); ++e)
    for (auto p : policies)
      for (auto s : seeds_of(cfg, opts)) jobs.push_back({e, p, s});
  return jobs;
}

std::size_t workers_of(const RunOptions& opts) {
  return opts.workers == 0 ? default_workers() : opts.workers;
}

void report(const RunOptions& opts, const fs::path& p) {
  if (opts.report) opts.report(p.string());
}

std::uint64_t explore_seed(std::uint64_t seed, const std::string& env) {
  return stream_seed(seed, "explore/" + env);
}

WeightVector pretrained(const ExperimentConfig& cfg, const ScenarioSpec& spec, std::uint64_t seed) {
  return pretrain_weights(spec, cfg.exploration, cfg.pretrain_pairs,
                          stream_seed(seed, "pretrain/" + spec.environment_name));
}

}  // namespace

std::vector<fs::path> cmd_explore(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  const fs::path root = output_root(cfg, opts);
  const std::uint64_t hash = config_hash(cfg);
  const auto jobs = jobs_of(cfg, opts);
  const auto seeds = seeds_of(cfg, opts);

  std::vector<World> worlds;
  for (const auto& s : cfg.scenarios) worlds.push_back(generate_world(s));
  // Weights depend on (environment, seed) only, so paired policies share them.
  std::map<std::pair<std::size_t, std::uint64_t>, WeightVector> weights;
  for (std::size_t e = 0; e < cfg.scenarios.size(); ++e)
    for (auto s : seeds) weights[{e, s}] = {};
  std::vector<std::pair<std::size_t, std::uint64_t>> keys;
  for (const auto& [k, _] : weights) keys.push_back(k);
  std::vector<WeightVector> fitted(keys.size());
  parallel_for(keys.size(), workers_of(opts), [&](std::size_t i) {
    fitted[i] = pretrained(cfg, cfg.scenarios[keys[i].first], keys[i].second);
  });
  for (std::size_t i = 0; i < keys.size(); ++i) weights[keys[i]] = fitted[i];

  std::vector<std::vector<fs::path>> written(jobs.size());
  parallel_for(jobs.size(), workers_of(opts), [&](std::size_t i) {
    const Job& job = jobs[i];
    const auto& spec = cfg.scenarios[job.env];
    const WeightVector& w = weights.at({job.env, job.seed});
    const auto traj = run_exploration(worlds[job.env], job.policy, cfg.exploration, w,
                                      explore_seed(job.seed, spec.environment_name));
    const fs::path dir = run_directory(root, spec.environment_name, job.policy, job.seed);
    fs::create_directories(dir);
    traj.store.save(dir / "store.avx", {hash, job.seed, worlds[job.env].sample_rate_hz, w});
    std::ostringstream csv;
    csv << config_hash_line(hash);
    write_step_log(csv, traj.steps);
    write_file_atomic(dir / "steps.csv", csv.str());
    written[i] = {dir / "store.avx", dir / "steps.csv"};
  });
  std::vector<fs::path> out;
  for (auto& w : written)
    for (auto& p : w) {
      report(opts, p);
      out.push_back(p);
    }
  return out;
}

namespace {

struct LoadedRun {
  AVStore store;
  StoreMetadata meta;
  std::vector<std::size_t> scene_start;
};

// First store index of each world scene, in world order.
std::vector<std::size_t> scene_starts(const AVStore& store, const World& world) {
  std::vector<std::size_t> starts;
  for (const auto& scene : world.scenes) {
    std::size_t i = 0;
    while (i < store.size() && store[i].point.scene_id != scene.scene_id) ++i;
    starts.push_back(i);
  }
  return starts;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<fs::path> cmd_evaluate(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  const auto& t = cfg.tasks;
  if (!t.audio_pred && !t.material && !t.music && !t.activity) return {};

  const fs::path root = output_root(cfg, opts);
  const std::uint64_t hash = config_hash(cfg);
  const auto seeds = seeds_of(cfg, opts);
  const auto jobs = jobs_of(cfg, opts);
  const bool need_runs = t.audio_pred || t.material;

  if (need_runs) {
    std::vector<std::string> missing;
    for (const auto& j : jobs) {
      const fs::path p =
          run_directory(root, cfg.scenarios[j.env].environment_name, j.policy, j.seed) / "store.avx";
      if (!fs::exists(p)) missing.push_back(p.string());
    }
    if (!missing.empty()) {
      std::string msg = "missing exploration artifacts (run explore first):";
      for (const auto& m : missing) msg += "\n  " + m;
      throw ValidationError(msg);
    }
  }

  std::vector<World> worlds;
  for (const auto& s : cfg.scenarios) worlds.push_back(generate_world(s));
  std::vector<VisualExtractor> extractors;
  for (const auto& w : worlds) extractors.emplace_back(w, cfg.exploration.visual);

  json summary;
  summary["config_hash"] = hex64(hash);
  summary["seeds"] = seeds;
  std::vector<fs::path> out;
  auto emit = [&](const fs::path& p, const std::string& contents) {
    fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
    write_file_atomic(p, contents);
    report(opts, p);
    out.push_back(p);
  };

  if (need_runs) {
    // The held-out test set depends on (environment, seed) only.
    std::map<std::pair<std::size_t, std::uint64_t>, std::vector<TestEntry>> tests;
    for (std::size_t e = 0; e < cfg.scenarios.size(); ++e)
      for (auto s : seeds)
        tests[{e, s}] = build_test_set(worlds[e], extractors[e], cfg.exploration,
                                       stream_seed(s, "test/" + cfg.scenarios[e].environment_name));

    std::vector<std::vector<CurvePoint>> curves(jobs.size());
    std::vector<std::vector<MaterialCurvePoint>> materials(jobs.size());
    parallel_for(jobs.size(), workers_of(opts), [&](std::size_t i) {
      const Job& job = jobs[i];
      const auto& env = cfg.scenarios[job.env].environment_name;
      const fs::path dir = run_directory(root, env, job.policy, job.seed);
      StoreMetadata meta;
      const AVStore store = AVStore::load(dir / "store.avx", &meta, cfg.exploration.mfcc);
      if (meta.config_hash != hash)
        throw ValidationError(dir.string() + "/store.avx was produced by config " +
                              hex64(meta.config_hash) + ", current config is " + hex64(hash));
      const auto& test = tests.at({job.env, job.seed});
      if (t.audio_pred) {
        const auto starts = scene_starts(store, worlds[job.env]);
        const auto snaps = snapshot_schedule(store.size(), cfg.snapshot_interval);
        curves[i] = eval_audio_prediction(store, snaps, starts, test, meta.weights);
      }
      if (t.material) {
        materials[i] = eval_material(store.view().records(), test, cfg.material,
                                     stream_seed(job.seed, "material/" + env + "/" +
                                                               std::string(to_string(job.policy))));
      }
    });

    if (t.audio_pred) {
      std::ostringstream csv;
      csv << config_hash_line(hash);
      csv << "environment,policy,seed,samples,scene,active_entries,mean_mcd\n";
      json js;
      // AUC per (seed, policy), summed over environments, for the win count.
      std::map<std::uint64_t, std::map<std::string, double>> total_auc;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& env = cfg.scenarios[jobs[i].env].environment_name;
        const std::string pol(to_string(jobs[i].policy));
        for (const auto& p : curves[i]) {
          csv << env << ',' << pol << ',' << jobs[i].seed << ',' << p.samples << ','
              << worlds[jobs[i].env].scenes[p.scene_index].scene_id << ',' << p.active_entries
              << ',' << format_double(p.mean_mcd) << '\n';
        }
        const double auc = curve_area(curves[i]);
        js["auc"][env][pol][std::to_string(jobs[i].seed)] = auc;
        js["final_mcd"][env][pol][std::to_string(jobs[i].seed)] =
            curves[i].empty() ? json(nullptr) : finite_or_null(curves[i].back().mean_mcd);
        total_auc[jobs[i].seed][pol] += auc;
      }
      for (auto& [env, by_policy] : js["auc"].items())
        for (auto& [pol, by_seed] : by_policy.items()) {
          std::vector<double> v;
          for (auto& [_, a] : by_seed.items()) v.push_back(a.get<double>());
          js["auc_mean"][env][pol] = mean_of(v);
        }
      const auto policies = opts.policies.value_or(cfg.policies);
      if (std::count(policies.begin(), policies.end(), PolicyKind::curiosity) &&
          policies.size() > 1) {
        std::size_t wins = 0;
        for (const auto& [seed, by_pol] : total_auc) {
          const double cur = by_pol.at("curiosity");
          bool win = true;
          for (const auto& [pol, a] : by_pol)
            if (pol != "curiosity" && !(cur < a)) win = false;
          wins += win ? 1 : 0;
        }
        js["curiosity_wins"] = wins;
        js["paired_seeds"] = total_auc.size();
      }
      summary["audio_prediction"] = std::move(js);
      emit(root / "audio_prediction.csv", csv.str());
    }

    if (t.material) {
      std::ostringstream csv;
      csv << config_hash_line(hash);
      csv << "environment,policy,seed,run,variant,samples,accuracy\n";
      json js;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& env = cfg.scenarios[jobs[i].env].environment_name;
        const std::string pol(to_string(jobs[i].policy));
        std::size_t final_size = 0;
        for (const auto& p : materials[i]) final_size = std::max(final_size, p.samples);
        std::map<std::string, std::vector<double>> finals;
        for (const auto& p : materials[i]) {
          csv << env << ',' << pol << ',' << jobs[i].seed << ',' << p.run << ','
              << to_string(p.variant) << ',' << p.samples << ',' << format_double(p.accuracy) << '\n';
          if (p.samples == final_size) finals[std::string(to_string(p.variant))].push_back(p.accuracy);
        }
        for (const auto& [variant, acc] : finals)
          js["final_accuracy"][env][pol][std::to_string(jobs[i].seed)][variant] = mean_of(acc);
      }
      summary["material"] = std::move(js);
      emit(root / "material.csv", csv.str());
    }
  }

  if (t.music) {
    const ScenarioSpec instruments[] = {xylophone_scenario(), drums_scenario()};
    DemoConfig demo;
    demo.noise_level = cfg.music.noise_level;
    std::vector<MusicReport> reports(seeds.size() * 2);
    parallel_for(reports.size(), workers_of(opts), [&](std::size_t i) {
      const auto& spec = instruments[i % 2];
      const std::uint64_t seed = seeds[i / 2];
      reports[i] = run_music_imitation(spec, cfg.music.budget, cfg.music.demos, demo,
                                       cfg.exploration, pretrained(cfg, spec, seed),
                                       stream_seed(seed, "music/" + spec.environment_name));
    });
    std::ostringstream csv;
    csv << config_hash_line(hash);
    csv << "instrument,seed,trial,truth_object,truth_part,predicted_object,predicted_part,energy,"
           "correct\n";
    json js;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      const std::uint64_t seed = seeds[i / 2];
      for (std::size_t k = 0; k < r.trials.size(); ++k) {
        const auto& tr = r.trials[k];
        csv << r.instrument << ',' << seed << ',' << k << ',' << tr.truth.object_id << ','
            << tr.truth.part_id << ',' << tr.predicted.object_id << ',' << tr.predicted.part_id
            << ',' << format_double(tr.energy) << ',' << (tr.correct ? 1 : 0) << '\n';
      }
      js["accuracy"][r.instrument][std::to_string(seed)] = r.accuracy;
    }
    summary["music"] = std::move(js);
    emit(root / "music.csv", csv.str());
  }

  if (t.activity) {
    DemoConfig demo;
    demo.noise_level = cfg.activity.noise_level;
    const ScenarioSpec spec = activity_scenario();
    std::vector<ActivityReport> reports(seeds.size());
    parallel_for(reports.size(), workers_of(opts), [&](std::size_t i) {
      reports[i] = run_activity_recognition(spec, cfg.activity.budget, cfg.activity.trials, demo,
                                            cfg.exploration, pretrained(cfg, spec, seeds[i]),
                                            stream_seed(seeds[i], "activity"));
    });
    std::ostringstream csv;
    csv << config_hash_line(hash);
    csv << "seed,trial,truth,predicted,correct\n";
    json js;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      for (std::size_t k = 0; k < reports[i].trials.size(); ++k) {
        const auto& tr = reports[i].trials[k];
        csv << seeds[i] << ',' << k << ',' << tr.truth << ',' << tr.predicted << ','
            << (tr.correct ? 1 : 0) << '\n';
      }
      js["accuracy"][std::to_string(seeds[i])] = reports[i].accuracy;
      js["p_value"][std::to_string(seeds[i])] = reports[i].p_value;
    }
    summary["activity"] = std::move(js);
    emit(root / "activity.csv", csv.str());
  }

  emit(root / "summary.json", summary.dump(2) + "\n");
  return out;
}

std::vector<fs::path> cmd_export_wav(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  const fs::path root = output_root(cfg, opts);
  std::vector<fs::path> out;
  std::vector<std::string> missing;
  for (const auto& job : jobs_of(cfg, opts)) {
    const fs::path dir =
        run_directory(root, cfg.scenarios[job.env].environment_name, job.policy, job.seed);
    if (!fs::exists(dir / "store.avx")) {
      missing.push_back((dir / "store.avx").string());
      continue;
    }
    const AVStore store = AVStore::load(dir / "store.avx", nullptr, cfg.exploration.mfcc);
    fs::create_directories(dir / "wav");
    for (std::size_t i = 0; i < store.size(); ++i) {
      const auto& p = store[i].point;
      char name[32];
      std::snprintf(name, sizeof(name), "%04zu_", i);
      const fs::path file = dir / "wav" / (name + p.object_id + "_" + p.part_id + ".wav");
      write_wav(*store[i].waveform, file);
      out.push_back(file);
    }
    report(opts, dir / "wav");
  }
  if (!missing.empty()) {
    std::string msg = "missing exploration artifacts (run explore first):";
    for (const auto& m : missing) msg += "\n  " + m;
    throw ValidationError(msg);
  }
  return out;
}

}  // namespace avx
