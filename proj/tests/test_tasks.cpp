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

#include <algorithm>
#include <cmath>
#include <set>

#include "avx/tasks.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace avx;

namespace {

ExplorationConfig quiet_config() {
  ExplorationConfig cfg;
  cfg.visual.noise_sigma = 0.0;
  return cfg;
}

World tiny_world(std::uint64_t seed) {
  ProceduralOptions opts;
  opts.scenes = 2;
  opts.pool_size = 5;
  opts.objects_per_scene = {2, 3};
  return generate_world(procedural_scenario("tasks-test", seed, 0.0, opts));
}

AVStore store_from(std::span<const TestEntry> entries) {
  AVStore store;
  for (const auto& e : entries) store.insert({e.point, e.label, e.visual, e.audio, e.waveform});
  return store;
}

}  // namespace

TEST_CASE("MLP gradients match central differences") {
  Mlp net(4, 5, 3, 7);
  Rng rng(1);
  Eigen::MatrixXd x(4, 9);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const std::vector<int> labels{0, 1, 2, 2, 1, 0, 0, 1, 2};
  const double decay = 1e-2;
  Mlp::Gradients g;
  net.loss_and_gradient(x, labels, decay, g);
  const double h = 1e-6;
  for (std::size_t i = 0; i < net.parameter_count(); ++i) {
    const double saved = net.parameter(i);
    net.parameter(i) = saved + h;
    const double up = net.loss(x, labels, decay);
    net.parameter(i) = saved - h;
    const double down = net.loss(x, labels, decay);
    net.parameter(i) = saved;
    const double numeric = (up - down) / (2 * h);
    const double analytic = Mlp::gradient_at(g, i);
    CHECK(std::abs(numeric - analytic) <= 1e-4 * std::max(1.0, std::abs(numeric)));
  }
}

TEST_CASE("a separable toy problem is learned exactly") {
  Rng rng(2);
  LabeledData data;
  for (int i = 0; i < 120; ++i) {
    const int c = i % 3;
    std::vector<double> x(6);
    for (auto& v : x) v = 0.3 * rng.normal();
    x[static_cast<std::size_t>(2 * c)] += 3.0;
    data.inputs.push_back(x);
    data.labels.push_back(c);
  }
  HeadHyper hyper;
  hyper.epochs = 200;
  hyper.seed = 3;
  const auto head = train_classifier(HeadVariant::vision_only, data, hyper);
  std::size_t right = 0;
  for (std::size_t i = 0; i < data.inputs.size(); ++i)
    right += static_cast<int>(head.predict(data.inputs[i])) == data.labels[i];
  CHECK(right == data.inputs.size());

  LabeledData one;
  one.inputs = {{1.0}, {2.0}};
  one.labels = {4, 4};
  CHECK_THROWS_AS(train_classifier(HeadVariant::audio_only, one, hyper), ValidationError);
}

TEST_CASE("class-balanced accuracy averages per-class recall") {
  using M = Material;
  const std::vector<M> truth{M::wood, M::wood, M::wood, M::metal};
  const std::vector<M> pred{M::wood, M::wood, M::metal, M::metal};
  CHECK(class_balanced_accuracy(truth, pred) == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0));
  CHECK(class_balanced_accuracy(truth, truth) == 1.0);
  const std::vector<M> constant(4, M::wood);
  CHECK(class_balanced_accuracy(truth, constant) == doctest::Approx(0.5));
}

TEST_CASE("binomial upper tail matches explicit sums") {
  for (auto [n, k, p] : {std::tuple{10, 3, 0.2}, {100, 40, 1.0 / 6.0}, {35, 35, 0.5}, {50, 1, 0.01}})
    CHECK(binomial_upper_tail(n, k, p) ==
          doctest::Approx(oracle::binomial_tail(n, k, p)).epsilon(1e-9));
  CHECK(binomial_upper_tail(10, 0, 0.3) == 1.0);
  CHECK(binomial_upper_tail(10, 11, 0.3) == 0.0);
}

TEST_CASE("snapshot schedule") {
  CHECK(snapshot_schedule(12, 5) == std::vector<std::size_t>{5, 10, 12});
  CHECK(snapshot_schedule(10, 5) == std::vector<std::size_t>{5, 10});
  CHECK(snapshot_schedule(3, 5) == std::vector<std::size_t>{3});
  CHECK_THROWS_AS(snapshot_schedule(10, 0), ValidationError);
}

TEST_CASE("test set: one held-out strike per part per scene") {
  const World world = tiny_world(5);
  const auto cfg = quiet_config();
  const VisualExtractor ex(world, cfg.visual);
  const auto test = build_test_set(world, ex, cfg, 9);
  std::size_t parts = 0;
  for (const auto& s : world.scenes) parts += s.part_count();
  REQUIRE(test.size() == parts);
  for (const auto& e : test) {
    CHECK(e.point.u >= 0.45);
    CHECK(e.point.u <= 0.55);
    CHECK(e.label == world.resolve(e.point).part->material);
    CHECK(world.scene_index(e.point.scene_id) == e.scene_index);
  }
}

TEST_CASE("audio prediction curve") {
  const World world = tiny_world(6);
  const auto cfg = quiet_config();
  const VisualExtractor ex(world, cfg.visual);
  const auto test = build_test_set(world, ex, cfg, 4);
  const AVStore store = store_from(test);
  std::size_t first_scene = 0;
  for (const auto& e : test) first_scene += e.scene_index == 0;
  // Scene 1 counts as started one step after the scene-0 strikes.
  const std::vector<std::size_t> scene_start{0, first_scene + 1};

  // A store holding the test strikes themselves retrieves them exactly.
  const std::vector<std::size_t> snaps{0, first_scene, store.size()};
  const auto curve = eval_audio_prediction(store, snaps, scene_start, test, {});
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].mean_mcd == kInfiniteNovelty);
  CHECK(curve[1].active_entries == first_scene);
  CHECK(curve[1].mean_mcd == 0.0);
  CHECK(curve[2].active_entries == test.size());
  CHECK(curve[2].scene_index == 1);
  CHECK(curve[2].mean_mcd == 0.0);
  CHECK(curve_area(curve) == 0.0);

  // Cross-check one point against direct retrieval.
  const auto part = eval_audio_prediction(store, std::vector<std::size_t>{2}, scene_start, test, {});
  double sum = 0.0;
  for (std::size_t i = 0; i < first_scene; ++i)
    sum += mcd(store.view(2).predict_audio(test[i].visual, {}).audio.mfcc, test[i].audio.mfcc);
  CHECK(part[0].mean_mcd == doctest::Approx(sum / first_scene).epsilon(1e-12));

  // The best possible retrieval from a growing store never gets worse.
  double prev = INFINITY;
  for (std::size_t n = 1; n <= store.size(); ++n) {
    double total = 0.0;
    for (const auto& e : test) {
      double best = INFINITY;
      for (const auto& r : store.view(n).records()) best = std::min(best, mcd(e.audio.mfcc, r.audio.mfcc));
      total += best;
    }
    CHECK(total <= prev);
    prev = total;
  }
}

TEST_CASE("imitation: exact demos and amplitude invariance") {
  const World world = generate_world(xylophone_scenario());
  auto cfg = quiet_config();
  cfg.budget_per_scene = 24;
  cfg.candidates_per_step = 32;
  WeightVector w;
  w.w = {0.0, 8.0, 11.0, 14.0, 4.0};
  const auto traj = run_exploration(world, PolicyKind::curiosity, cfg, w, 3);
  const VisualExtractor ex(world, cfg.visual);
  const Scene& scene = world.scenes.front();

  // A lone store record is the only possible prediction.
  AVStore single;
  single.insert(AVRecord(traj.store[5]));
  const auto r1 = imitate_note(*traj.store[5].waveform, single.view(), scene, ex, w, cfg, {}, 1);
  CHECK(r1.mcd == 0.0);
  CHECK(r1.record == 0);
  CHECK(r1.point.object_id == scene.objects[0].object_id);

  const InteractionPoint truth{scene.scene_id, scene.objects[0].object_id,
                               scene.objects[0].parts[3].part_id, 0.3};
  const Waveform demo = synthesize_impact(truth, world, {1.0, 0.01}, 77);
  const auto base = imitate_note(demo, traj.store.view(), scene, ex, w, cfg, {}, 2);
  CHECK(base.point.part_id == truth.part_id);
  for (double g : {0.25, 0.5, 2.0}) {
    Waveform scaled = demo;
    for (auto& s : scaled.samples) s *= g;
    const auto r = imitate_note(scaled, traj.store.view(), scene, ex, w, cfg, {}, 2);
    CHECK(r.point == base.point);
    CHECK(std::abs(r.mcd - base.mcd) < 1e-9);
  }
  AVStore empty;
  CHECK_THROWS_AS(imitate_note(demo, empty.view(), scene, ex, w, cfg, {}, 2), Error);
}

TEST_CASE("superposition matching") {
  const World world = generate_world(activity_scenario());
  const Scene& scene = world.scenes.front();
  auto clip = [&](const std::string& obj, double u, std::uint64_t seed) {
    return normalize_and_clip(synthesize_impact({scene.scene_id, obj, "body", u}, world, {}, seed));
  };
  const Waveform plate = clip("plate", 0.3, 1);
  const std::vector<Waveform> items{clip("item_glass", 0.3, 2), clip("item_metal", 0.6, 3),
                                    clip("item_wood", 0.2, 4)};
  std::vector<std::vector<const Waveform*>> cands;
  for (const auto& w : items) cands.push_back({&w});
  const MfccConfig mcfg;
  for (std::size_t t = 0; t < items.size(); ++t) {
    const auto demo = compute_mfcc(superimpose(items[t], plate), mcfg);
    CHECK(match_superposition(demo, cands, {&plate}, mcfg) == t);
  }

  // A silent placement reduces to plain audio nearest neighbour.
  const Waveform silence{std::vector<double>(plate.samples.size(), 0.0), 16000};
  const Waveform query = clip("item_metal", 0.1, 9);
  const auto qm = compute_mfcc(query, mcfg);
  AVStore store;
  for (const auto& w : items) {
    AVRecord r;
    r.point = {"table", "x" + std::to_string(store.size()), "body", 0.5};
    r.audio = extract_audio(w);
    store.insert(std::move(r));
  }
  CHECK(match_superposition(qm, cands, {&silence}, mcfg) ==
        store.view().nearest_by_audio(qm, 1)[0].index);

  // Identical candidates tie; the lowest index wins.
  std::vector<std::vector<const Waveform*>> same{{&items[1]}, {&items[1]}};
  CHECK(match_superposition(compute_mfcc(superimpose(items[1], plate), mcfg), same, {&plate}, mcfg) == 0);
  CHECK_THROWS_AS(match_superposition(qm, {}, {&plate}, mcfg), ValidationError);
}

TEST_CASE("picked-object inference") {
  const World world = generate_world(activity_scenario());
  auto cfg = quiet_config();
  cfg.budget_per_scene = 28;
  const WeightVector w;
  const auto traj = run_exploration(world, PolicyKind::curiosity, cfg, w, 8);
  const VisualExtractor ex(world, cfg.visual);
  const Scene& scene = world.scenes.front();
  std::vector<std::string> picked;
  for (const auto& o : scene.objects)
    if (o.object_id != "plate") picked.push_back(o.object_id);

  // Noiseless demos built from stored strikes are recovered exactly.
  std::size_t plate_rec = SIZE_MAX;
  for (std::size_t i = 0; i < traj.store.size(); ++i)
    if (traj.store[i].point.object_id == "plate") plate_rec = i;
  REQUIRE(plate_rec != SIZE_MAX);
  std::set<std::string> tried;
  for (std::size_t i = 0; i < traj.store.size(); ++i) {
    const auto& rec = traj.store[i];
    if (rec.point.object_id == "plate" || !tried.insert(rec.point.object_id).second) continue;
    const Waveform demo = superimpose(*rec.waveform, *traj.store[plate_rec].waveform);
    CHECK(infer_picked_object(demo, picked, "plate", traj.store.view(), scene, ex, w, cfg, {}, 1) ==
          rec.point.object_id);
  }
  CHECK(tried.size() == picked.size());

  // Objects the store never struck are named.
  const std::vector<std::string> unknown{"item_glass", "ghost"};
  CHECK_THROWS_WITH_AS(
      infer_picked_object(*traj.store[0].waveform, unknown, "plate", traj.store.view(), scene, ex,
                          w, cfg, {}, 1),
      doctest::Contains("ghost"), ValidationError);
}

TEST_CASE("two very different objects are told apart through noise") {
  ScenarioSpec spec = activity_scenario();
  const std::set<std::string> keep{"plate", "item_metal", "item_rubber"};
  std::erase_if(spec.catalogue, [&](const ObjectTemplate& o) { return !keep.count(o.object_id); });
  std::erase_if(spec.scenes[0].object_refs, [&](const std::string& id) { return !keep.count(id); });
  DemoConfig demo;
  demo.noise_level = 0.02;
  const auto report = run_activity_recognition(spec, 20, 30, demo, quiet_config(), {}, 5);
  CHECK(report.trials.size() == 30);
  CHECK(report.correct >= 27);
  CHECK(report.p_value == doctest::Approx(oracle::binomial_tail(30, report.correct, 0.5)).epsilon(1e-9));
}

TEST_CASE("material evaluation falls back on single-class prefixes") {
  const World world = tiny_world(11);
  const auto cfg = quiet_config();
  const VisualExtractor ex(world, cfg.visual);
  const auto test = build_test_set(world, ex, cfg, 1);
  const auto train = build_test_set(world, ex, cfg, 2);
  const AVStore store = store_from(train);
  std::set<Material> classes;
  for (const auto& e : test) classes.insert(e.label);
  REQUIRE(classes.size() >= 2);

  MaterialEvalConfig mc;
  mc.runs = 2;
  mc.checkpoints = {1};
  mc.hyper.epochs = 20;
  const auto points = eval_material(store.view().records(), test, mc, 3);
  REQUIRE(points.size() == 2 * 3 * 2);
  for (const auto& p : points) {
    CHECK(p.accuracy >= 0.0);
    CHECK(p.accuracy <= 1.0);
    if (p.samples == 1) CHECK(p.accuracy == doctest::Approx(1.0 / classes.size()));
  }
  const auto again = eval_material(store.view().records(), test, mc, 3);
  for (std::size_t i = 0; i < points.size(); ++i) CHECK(points[i].accuracy == again[i].accuracy);
}

TEST_CASE("head inputs have fixed layouts") {
  Rng rng(3);
  const World world = tiny_world(3);
  const VisualExtractor ex(world);
  const auto& s = world.scenes[0];
  const InteractionPoint p{s.scene_id, s.objects[0].object_id, s.objects[0].parts[0].part_id, 0.5};
  const auto v = ex.extract(p, 1);
  const auto a = extract_audio(normalize_and_clip(synthesize_impact(p, world, {}, 1)));
  CHECK(head_input(HeadVariant::vision_only, v, a).size() == 104);
  CHECK(head_input(HeadVariant::audio_only, v, a).size() == 90);
  CHECK(head_input(HeadVariant::audiovisual, v, a).size() == 194);
}
