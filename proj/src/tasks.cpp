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

#include "avx/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace avx {

// ---------------------------------------------------------------------------
// Test set and audio prediction

std::vector<TestEntry> build_test_set(const World& world, const VisualExtractor& extractor,
                                      const ExplorationConfig& cfg, std::uint64_t seed) {
  const auto interval = cfg.candidates.reserved.value_or(std::pair{0.45, 0.55});
  std::vector<TestEntry> out;
  for (std::size_t s = 0; s < world.scenes.size(); ++s) {
    const auto& scene = world.scenes[s];
    for (const auto& obj : scene.objects) {
      for (const auto& part : obj.parts) {
        const std::string tag = "test/" + scene.scene_id + "/" + obj.object_id + "/" + part.part_id;
        Rng rng(stream_seed(seed, tag));
        InteractionPoint p{scene.scene_id, obj.object_id, part.part_id,
                           rng.uniform(interval.first, interval.second)};
        AVRecord rec = observe(p, world, extractor, cfg, stream_seed(seed, tag + "/strike"));
        out.push_back({std::move(rec.point), s, rec.material, std::move(rec.visual),
                       std::move(rec.audio), std::move(rec.waveform)});
      }
    }
  }
  return out;
}

std::vector<std::size_t> snapshot_schedule(std::size_t total, std::size_t interval) {
  if (interval == 0) throw ValidationError("snapshot_interval must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t n = interval; n < total; n += interval) out.push_back(n);
  if (total > 0) out.push_back(total);
  return out;
}

std::vector<CurvePoint> eval_audio_prediction(const AVStore& store,
                                              std::span<const std::size_t> snapshots,
                                              std::span<const std::size_t> scene_start,
                                              std::span<const TestEntry> test,
                                              const WeightVector& w) {
  std::vector<CurvePoint> curve;
  for (std::size_t n : snapshots) {
    CurvePoint pt;
    pt.samples = std::min(n, store.size());
    for (std::size_t s = 0; s < scene_start.size(); ++s)
      if (scene_start[s] <= pt.samples) pt.scene_index = s;
    const StoreView view = store.view(pt.samples);
    double total = 0.0;
    for (const auto& e : test) {
      if (e.scene_index >= scene_start.size() || scene_start[e.scene_index] > pt.samples) continue;
      ++pt.active_entries;
      if (!view.empty()) total += mcd(e.audio.mfcc, view.predict_audio(e.visual, w).audio.mfcc);
    }
    if (view.empty() || pt.active_entries == 0)
      pt.mean_mcd = view.empty() ? kInfiniteNovelty : 0.0;
    else
      pt.mean_mcd = total / static_cast<double>(pt.active_entries);
    curve.push_back(pt);
  }
  return curve;
}

double curve_area(std::span<const CurvePoint> curve) {
  double a = 0.0;
  for (const auto& p : curve)
    if (std::isfinite(p.mean_mcd)) a += p.mean_mcd;
  return a;
}

// ---------------------------------------------------------------------------
// Material classification

std::string_view to_string(HeadVariant v) {
  switch (v) {
    case HeadVariant::vision_only: return "vision_only";
    case HeadVariant::audio_only: return "audio_only";
    case HeadVariant::audiovisual: return "audiovisual";
  }
  return "?";
}

std::vector<double> head_input(HeadVariant v, const VisualFeature& visual,
                               const AudioFeature& audio) {
  std::vector<double> out;
  if (v != HeadVariant::audio_only) out = visual.concatenated();
  if (v != HeadVariant::vision_only) {
    const auto a = audio.summary();
    out.insert(out.end(), a.begin(), a.end());
  }
  return out;
}

ClassifierHead::ClassifierHead(HeadVariant variant, std::vector<double> mean,
                               std::vector<double> scale, Mlp net)
    : variant_(variant), mean_(std::move(mean)), scale_(std::move(scale)), net_(std::move(net)) {}

std::array<double, kMaterialCount> ClassifierHead::predict_proba(std::span<const double> input) const {
  if (input.size() != mean_.size())
    throw ValidationError("classifier input has " + std::to_string(input.size()) +
                          " features, expected " + std::to_string(mean_.size()));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(input.size()), 1);
  for (std::size_t i = 0; i < input.size(); ++i)
    x(static_cast<Eigen::Index>(i), 0) = (input[i] - mean_[i]) / scale_[i];
  const Eigen::MatrixXd p = net_.forward(x);
  std::array<double, kMaterialCount> out{};
  for (std::size_t c = 0; c < kMaterialCount; ++c) out[c] = p(static_cast<Eigen::Index>(c), 0);
  return out;
}

Material ClassifierHead::predict(std::span<const double> input) const {
  const auto p = predict_proba(input);
  return kAllMaterials[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())];
}

Material ClassifierHead::predict(const VisualFeature& visual, const AudioFeature& audio) const {
  return predict(head_input(variant_, visual, audio));
}

ClassifierHead train_classifier(HeadVariant variant, const LabeledData& data,
                                const HeadHyper& hyper) {
  const std::size_t n = data.inputs.size();
  if (n == 0 || data.labels.size() != n)
    throw ValidationError("train_head: need one label per input and at least one input");
  if (std::set<int>(data.labels.begin(), data.labels.end()).size() < 2)
    throw ValidationError("train_head: training data contains a single class");
  for (int y : data.labels)
    if (y < 0 || y >= static_cast<int>(kMaterialCount))
      throw ValidationError("train_head: label out of range");
  const std::size_t dim = data.inputs.front().size();

  std::vector<double> mean(dim, 0.0), scale(dim, 0.0);
  for (const auto& x : data.inputs) {
    if (x.size() != dim) throw ValidationError("train_head: ragged inputs");
    for (std::size_t i = 0; i < dim; ++i) mean[i] += x[i];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  for (const auto& x : data.inputs)
    for (std::size_t i = 0; i < dim; ++i) scale[i] += (x[i] - mean[i]) * (x[i] - mean[i]);
  for (auto& s : scale) {
    s = std::sqrt(s / static_cast<double>(n));
    if (s < 1e-8) s = 1.0;
  }

  Eigen::MatrixXd all(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < dim; ++i)
      all(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (data.inputs[j][i] - mean[i]) / scale[i];

  Mlp net(dim, hyper.hidden, kMaterialCount, stream_seed(hyper.seed, "init"));
  Rng rng(stream_seed(hyper.seed, "batches"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, hyper.batch);
  Mlp::Gradients grad;
  Eigen::MatrixXd xb;
  std::vector<int> yb;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t m = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(m));
      yb.resize(m);
      for (std::size_t j = 0; j < m; ++j) {
        xb.col(static_cast<Eigen::Index>(j)) = all.col(static_cast<Eigen::Index>(order[start + j]));
        yb[j] = data.labels[order[start + j]];
      }
      net.loss_and_gradient(xb, yb, hyper.weight_decay, grad);
      net.step(grad, hyper.learning_rate, hyper.momentum);
    }
  }
  return ClassifierHead(variant, std::move(mean), std::move(scale), std::move(net));
}

ClassifierHead train_head(HeadVariant variant, std::span<const AVRecord> records,
                          const HeadHyper& hyper) {
  LabeledData data;
  for (const auto& r : records) {
    data.inputs.push_back(head_input(variant, r.visual, r.audio));
    data.labels.push_back(static_cast<int>(r.material));
  }
  return train_classifier(variant, data, hyper);
}

double class_balanced_accuracy(std::span<const Material> truth,
                               std::span<const Material> predicted) {
  if (truth.size() != predicted.size())
    throw ValidationError("class_balanced_accuracy: length mismatch");
  std::array<std::size_t, kMaterialCount> total{}, hit{};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto c = static_cast<std::size_t>(truth[i]);
    ++total[c];
    if (truth[i] == predicted[i]) ++hit[c];
  }
  double sum = 0.0;
  std::size_t classes = 0;
  for (std::size_t c = 0; c < kMaterialCount; ++c) {
    if (total[c] == 0) continue;
    sum += static_cast<double>(hit[c]) / static_cast<double>(total[c]);
    ++classes;
  }
  return classes == 0 ? 0.0 : sum / static_cast<double>(classes);
}

std::vector<MaterialCurvePoint> eval_material(std::span<const AVRecord> training,
                                              std::span<const TestEntry> test,
                                              const MaterialEvalConfig& cfg,
                                              std::uint64_t seed) {
  if (training.empty()) throw ValidationError("eval_material: no training records");
  if (test.empty()) throw ValidationError("eval_material: empty test set");
  std::vector<std::size_t> sizes;
  for (std::size_t c : cfg.checkpoints)
    if (c >= 1 && c < training.size()) sizes.push_back(c);
  sizes.push_back(training.size());
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  std::vector<Material> truth;
  for (const auto& e : test) truth.push_back(e.label);

  std::vector<std::vector<MaterialCurvePoint>> per_run(cfg.runs);
  parallel_for(cfg.runs, default_workers(), [&](std::size_t run) {
    Rng rng(stream_seed(seed, "material-run/" + std::to_string(run)));
    std::vector<std::size_t> order(training.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    std::vector<AVRecord> shuffled;
    for (std::size_t i : order) shuffled.push_back(training[i]);

    for (std::size_t size : sizes) {
      const std::span<const AVRecord> subset(shuffled.data(), size);
      std::set<Material> classes;
      for (const auto& r : subset) classes.insert(r.material);
      for (HeadVariant v : kAllVariants) {
        std::vector<Material> pred;
        if (classes.size() < 2) {
          pred.assign(test.size(), *classes.begin());
        } else {
          HeadHyper h = cfg.hyper;
          h.seed = stream_seed(seed, "head/" + std::to_string(run) + "/" +
                                         std::string(to_string(v)) + "/" + std::to_string(size));
          const auto head = train_head(v, subset, h);
          for (const auto& e : test) pred.push_back(head.predict(e.visual, e.audio));
        }
        per_run[run].push_back({run, v, size, class_balanced_accuracy(truth, pred)});
      }
    }
  });
  std::vector<MaterialCurvePoint> out;
  for (auto& r : per_run) out.insert(out.end(), r.begin(), r.end());
  return out;
}

// ---------------------------------------------------------------------------
// Imitation

namespace {

MfccMatrix demo_mfcc(const Waveform& demo, const ExplorationConfig& cfg) {
  return compute_mfcc(normalize_and_clip(demo, cfg.clip), cfg.mfcc);
}

}  // namespace

ImitationResult imitate_note(const Waveform& demo, StoreView store, const Scene& scene,
                             const VisualExtractor& extractor, const WeightVector& w,
                             const ExplorationConfig& cfg, const ImitationConfig& icfg,
                             std::uint64_t seed) {
  if (store.empty()) throw Error("imitate_note: store is empty");
  if (icfg.candidates_per_part == 0) throw ValidationError("imitate_note: no candidates per part");
  const MfccMatrix query = demo_mfcc(demo, cfg);
  Rng rng(stream_seed(seed, "imitation-candidates"));
  std::map<const AVRecord*, double> cache;
  ImitationResult best;
  best.mcd = kInfiniteNovelty;
  std::size_t idx = 0;
  for (const auto& obj : scene.objects) {
    for (const auto& part : obj.parts) {
      for (std::size_t k = 0; k < icfg.candidates_per_part; ++k, ++idx) {
        InteractionPoint p{scene.scene_id, obj.object_id, part.part_id,
                           rng.uniform(icfg.u_min, icfg.u_max)};
        const auto feature = extractor.extract(p, stream_seed(seed, "imitation/" + std::to_string(idx)));
        const AVRecord& rec = store.predict_audio(feature, w);
        auto it = cache.find(&rec);
        if (it == cache.end()) it = cache.emplace(&rec, mcd(query, rec.audio.mfcc)).first;
        if (it->second < best.mcd) {
          best.mcd = it->second;
          best.point = p;
          best.record = static_cast<std::size_t>(&rec - store.records().data());
        }
      }
    }
  }
  return best;
}

std::size_t match_superposition(const MfccMatrix& demo,
                                const std::vector<std::vector<const Waveform*>>& candidate_clips,
                                const std::vector<const Waveform*>& placement_clips,
                                const MfccConfig& mfcc_cfg) {
  if (candidate_clips.empty()) throw ValidationError("match_superposition: no candidates");
  if (placement_clips.empty()) throw ValidationError("match_superposition: no placement clips");
  std::size_t best = 0;
  double best_d = kInfiniteNovelty;
  for (std::size_t c = 0; c < candidate_clips.size(); ++c) {
    for (const Waveform* a : candidate_clips[c]) {
      for (const Waveform* b : placement_clips) {
        const double d = mcd(demo, compute_mfcc(superimpose(*a, *b), mfcc_cfg));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
    }
  }
  return best;
}

namespace {

// Record indices standing for an object's sound: its own strikes plus the
// retrieval predictions at sampled points.
std::vector<std::size_t> object_clip_records(const std::string& object_id, StoreView store,
                                             const Scene& scene, const VisualExtractor& extractor,
                                             const WeightVector& w, const ExplorationConfig& cfg,
                                             const ActivityConfig& acfg, std::uint64_t seed) {
  std::set<std::size_t> ids;
  for (std::size_t i = 0; i < store.size(); ++i)
    if (store[i].point.object_id == object_id) ids.insert(i);
  const ObjectSpec* obj = scene.find_object(object_id);
  if (obj && acfg.points_per_object > 0) {
    Rng rng(stream_seed(seed, "activity-points/" + object_id));
    for (std::size_t k = 0; k < acfg.points_per_object; ++k) {
      const auto& part = obj->parts[rng.index(obj->parts.size())];
      InteractionPoint p{scene.scene_id, object_id, part.part_id,
                         rng.uniform(cfg.candidates.u_min, cfg.candidates.u_max)};
      const auto f = extractor.extract(p, stream_seed(seed, "activity-visual/" + object_id + "/" +
                                                              std::to_string(k)));
      ids.insert(static_cast<std::size_t>(&store.predict_audio(f, w) - store.records().data()));
    }
  }
  return {ids.begin(), ids.end()};
}

struct SuperpositionTable {
  // mcd-ready MFCCs of superimpose(record a, record b), keyed by record pair.
  std::map<std::pair<std::size_t, std::size_t>, MfccMatrix> mfcc;
};

std::string infer_with_table(const MfccMatrix& demo, std::span<const std::string> picked,
                             const std::vector<std::vector<std::size_t>>& candidate_ids,
                             const std::vector<std::size_t>& placement_ids, StoreView store,
                             const MfccConfig& mfcc_cfg, SuperpositionTable& table) {
  std::size_t best = 0;
  double best_d = kInfiniteNovelty;
  for (std::size_t c = 0; c < picked.size(); ++c) {
    for (std::size_t a : candidate_ids[c]) {
      for (std::size_t b : placement_ids) {
        auto it = table.mfcc.find({a, b});
        if (it == table.mfcc.end())
          it = table.mfcc
                   .emplace(std::pair{a, b},
                            compute_mfcc(superimpose(*store[a].waveform, *store[b].waveform), mfcc_cfg))
                   .first;
        const double d = mcd(demo, it->second);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
    }
  }
  return picked[best];
}

void check_coverage(std::span<const std::string> picked, const std::string& placement,
                    StoreView store) {
  std::vector<std::string> missing;
  auto covered = [&](const std::string& id) {
    for (const auto& r : store.records())
      if (r.point.object_id == id) return true;
    return false;
  };
  for (const auto& id : picked)
    if (!covered(id)) missing.push_back(id);
  if (!covered(placement)) missing.push_back(placement);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationError("infer_picked_object: store has no strikes on: " + list);
  }
}

}  // namespace

std::string infer_picked_object(const Waveform& demo, std::span<const std::string> picked,
                                const std::string& placement, StoreView store,
                                const Scene& scene, const VisualExtractor& extractor,
                                const WeightVector& w, const ExplorationConfig& cfg,
                                const ActivityConfig& acfg, std::uint64_t seed) {
  if (picked.empty()) throw ValidationError("infer_picked_object: no picked candidates");
  check_coverage(picked, placement, store);
  std::vector<std::vector<std::size_t>> ids;
  for (const auto& id : picked)
    ids.push_back(object_clip_records(id, store, scene, extractor, w, cfg, acfg, seed));
  const auto placement_ids =
      object_clip_records(placement, store, scene, extractor, w, cfg, acfg, seed);
  SuperpositionTable table;
  return infer_with_table(demo_mfcc(demo, cfg), picked, ids, placement_ids, store, cfg.mfcc, table);
}

// ---------------------------------------------------------------------------
// Built-in scenes

ScenarioSpec xylophone_scenario(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.environment_name = "xylophone";
  spec.seed = seed;
  ObjectTemplate xylo{"xylophone", {}, 1.0};
  // Free-bar partial ratios 1 : 2.76 : 5.40, fundamentals a minor third apart.
  for (int i = 0; i < 8; ++i) {
    const double f0 = 400.0 * std::pow(1.2, i);
    ModalProfile p;
    p.modes = {{f0, 15.0, 1.0}, {2.76 * f0, 25.0, 0.5}, {5.40 * f0, 40.0, 0.3}};
    xylo.parts.push_back({"bar" + std::to_string(i + 1), Material::wood, p});
  }
  spec.catalogue.push_back(std::move(xylo));
  spec.scenes.push_back({"instrument", {"xylophone"}, 0});
  return spec;
}

ScenarioSpec drums_scenario(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.environment_name = "drums";
  spec.seed = seed;
  auto drum = [](std::string id, Material m, std::vector<Mode> modes) {
    return ObjectTemplate{std::move(id), {{"head", m, ModalProfile{std::move(modes)}}}, 1.0};
  };
  spec.catalogue.push_back(drum("kick", Material::rubber,
                                {{110.0, 25.0, 1.0}, {190.0, 40.0, 0.6}, {300.0, 60.0, 0.4}}));
  spec.catalogue.push_back(drum("snare", Material::plastic,
                                {{330.0, 35.0, 1.0}, {610.0, 50.0, 0.7}, {980.0, 70.0, 0.5},
                                 {1500.0, 90.0, 0.3}}));
  spec.catalogue.push_back(drum("cymbal", Material::metal,
                                {{2300.0, 6.0, 0.7}, {3450.0, 8.0, 1.0}, {4700.0, 9.0, 0.8},
                                 {5900.0, 12.0, 0.6}, {7200.0, 15.0, 0.4}}));
  spec.scenes.push_back({"instrument", {"kick", "snare", "cymbal"}, 0});
  return spec;
}

ScenarioSpec activity_scenario(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.environment_name = "pick_and_place";
  spec.seed = seed;
  SceneDescription scene{"table", {}, 0};
  spec.catalogue.push_back({"plate", {{"body", Material::ceramic, std::nullopt}}, std::nullopt});
  scene.object_refs.push_back("plate");
  for (Material m : kAllMaterials) {
    const std::string id = "item_" + std::string(to_string(m));
    spec.catalogue.push_back({id, {{"body", m, std::nullopt}}, std::nullopt});
    scene.object_refs.push_back(id);
  }
  spec.scenes.push_back(std::move(scene));
  return spec;
}

MusicReport run_music_imitation(const ScenarioSpec& instrument, std::size_t budget,
                                std::size_t demos, const DemoConfig& demo_cfg,
                                const ExplorationConfig& cfg, const WeightVector& w,
                                std::uint64_t seed) {
  const World world = generate_world(instrument);
  ExplorationConfig ecfg = cfg;
  ecfg.budget_per_scene = budget;
  ecfg.strike.noise_level = demo_cfg.noise_level;
  const auto traj = run_exploration(world, PolicyKind::curiosity, ecfg, w,
                                    stream_seed(seed, "music-explore/" + instrument.environment_name));
  const VisualExtractor extractor(world, cfg.visual);
  const Scene& scene = world.scenes.front();

  MusicReport report;
  report.instrument = instrument.environment_name;
  Rng rng(stream_seed(seed, "music-demos/" + instrument.environment_name));
  std::size_t correct = 0;
  for (std::size_t d = 0; d < demos; ++d) {
    const auto& obj = scene.objects[rng.index(scene.objects.size())];
    const auto& part = obj.parts[rng.index(obj.parts.size())];
    MusicTrial t;
    t.truth = {scene.scene_id, obj.object_id, part.part_id, rng.uniform(demo_cfg.u_lo, demo_cfg.u_hi)};
    t.energy = rng.uniform(demo_cfg.energy_lo, demo_cfg.energy_hi);
    const std::uint64_t demo_seed = rng.next();
    const auto raw = synthesize_impact(t.truth, world, {t.energy, demo_cfg.noise_level}, demo_seed,
                                       cfg.synthesis);
    t.predicted = imitate_note(raw, traj.store.view(), scene, extractor, w, cfg, {}, demo_seed).point;
    t.correct = t.predicted.object_id == t.truth.object_id && t.predicted.part_id == t.truth.part_id;
    correct += t.correct ? 1 : 0;
    report.trials.push_back(std::move(t));
  }
  report.accuracy = demos == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(demos);
  return report;
}

ActivityReport run_activity_recognition(const ScenarioSpec& scenario, std::size_t budget,
                                        std::size_t trials, const DemoConfig& demo_cfg,
                                        const ExplorationConfig& cfg, const WeightVector& w,
                                        std::uint64_t seed) {
  const World world = generate_world(scenario);
  ExplorationConfig ecfg = cfg;
  ecfg.budget_per_scene = budget;
  ecfg.strike.noise_level = demo_cfg.noise_level;
  const auto traj = run_exploration(world, PolicyKind::curiosity, ecfg, w,
                                    stream_seed(seed, "activity-explore"));
  const VisualExtractor extractor(world, cfg.visual);
  const Scene& scene = world.scenes.front();
  const std::string placement = "plate";
  std::vector<std::string> picked;
  for (const auto& o : scene.objects)
    if (o.object_id != placement) picked.push_back(o.object_id);

  const StoreView store = traj.store.view();
  check_coverage(picked, placement, store);
  const ActivityConfig acfg;
  std::vector<std::vector<std::size_t>> ids;
  for (const auto& id : picked)
    ids.push_back(object_clip_records(id, store, scene, extractor, w, cfg, acfg, seed));
  const auto placement_ids = object_clip_records(placement, store, scene, extractor, w, cfg, acfg, seed);
  SuperpositionTable table;

  ActivityReport report;
  Rng rng(stream_seed(seed, "activity-demos"));
  for (std::size_t t = 0; t < trials; ++t) {
    const std::string& truth = picked[rng.index(picked.size())];
    auto strike = [&](const std::string& object_id) {
      const ObjectSpec* obj = scene.find_object(object_id);
      const auto& part = obj->parts[rng.index(obj->parts.size())];
      InteractionPoint p{scene.scene_id, object_id, part.part_id,
                         rng.uniform(demo_cfg.u_lo, demo_cfg.u_hi)};
      const double energy = rng.uniform(demo_cfg.energy_lo, demo_cfg.energy_hi);
      return synthesize_impact(p, world, {energy, 0.0}, rng.next(), cfg.synthesis);
    };
    Waveform demo = strike(truth);
    const Waveform place = strike(placement);
    for (std::size_t i = 0; i < demo.samples.size() && i < place.samples.size(); ++i)
      demo.samples[i] += place.samples[i];
    if (demo_cfg.noise_level > 0.0) {
      Rng noise(rng.next());
      for (auto& s : demo.samples) s += demo_cfg.noise_level * noise.normal();
    }
    ActivityTrial trial;
    trial.truth = truth;
    trial.predicted = infer_with_table(demo_mfcc(demo, cfg), picked, ids, placement_ids, store,
                                       cfg.mfcc, table);
    trial.correct = trial.predicted == trial.truth;
    report.correct += trial.correct ? 1 : 0;
    report.trials.push_back(std::move(trial));
  }
  report.accuracy = trials == 0 ? 0.0 : static_cast<double>(report.correct) / static_cast<double>(trials);
  report.p_value = binomial_upper_tail(trials, report.correct, 1.0 / static_cast<double>(picked.size()));
  return report;
}

double binomial_upper_tail(std::size_t n, std::size_t k, double p) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  double total = 0.0;
  for (std::size_t i = k; i <= n; ++i) {
    const double log_term = std::lgamma(static_cast<double>(n) + 1.0) -
                            std::lgamma(static_cast<double>(i) + 1.0) -
                            std::lgamma(static_cast<double>(n - i) + 1.0) +
                            static_cast<double>(i) * std::log(p) +
                            static_cast<double>(n - i) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return std::min(1.0, total);
}

// ---------------------------------------------------------------------------

WeightVector pretrain_weights(const ScenarioSpec& like, const ExplorationConfig& cfg,
                              std::size_t pairs, std::uint64_t seed) {
  ProceduralOptions opts;
  opts.scenes = 1;
  opts.pool_size = 12;
  opts.objects_per_scene = {12, 12};
  ScenarioSpec spec = procedural_scenario("pretrain", stream_seed(seed, "pretrain-world"), 0.0, opts);
  spec.latent_dim = like.latent_dim;
  spec.extractor_seed = like.extractor_seed;
  spec.part_spread = like.part_spread;
  spec.parts_per_object = like.parts_per_object;
  const World world = generate_world(spec);
  const VisualExtractor extractor(world, cfg.visual);
  const Scene& scene = world.scenes.front();

  struct PartRef {
    const ObjectSpec* obj;
    const PartSpec* part;
  };
  std::vector<PartRef> parts;
  for (const auto& o : scene.objects)
    for (const auto& p : o.parts) parts.push_back({&o, &p});

  Rng rng(stream_seed(seed, "pretrain-pairs"));
  auto point_on = [&](const PartRef& r) {
    return InteractionPoint{scene.scene_id, r.obj->object_id, r.part->part_id,
                            rng.uniform(cfg.candidates.u_min, cfg.candidates.u_max)};
  };
  std::vector<ComponentDistances> dist;
  std::vector<double> target;
  for (std::size_t i = 0; i < pairs; ++i) {
    const PartRef a = parts[rng.index(parts.size())];
    PartRef b = a;
    if (i % 3 == 1) {
      std::vector<PartRef> same;
      for (const auto& p : parts)
        if (p.part != a.part && p.part->material == a.part->material) same.push_back(p);
      b = same.empty() ? parts[rng.index(parts.size())] : same[rng.index(same.size())];
    } else if (i % 3 == 2) {
      b = parts[rng.index(parts.size())];
    }
    const auto ra = observe(point_on(a), world, extractor, cfg, rng.next());
    const auto rb = observe(point_on(b), world, extractor, cfg, rng.next());
    dist.push_back(component_distances(ra.visual, rb.visual));
    target.push_back(mcd(ra.audio.mfcc, rb.audio.mfcc));
  }
  return fit_weights(dist, target);
}

}  // namespace avx
