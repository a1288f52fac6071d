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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "avx/av_store.hpp"
#include "avx/exploration.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace avx;

namespace {

VisualFeature random_feature(Rng& rng, double scale = 1.0) {
  VisualFeature f;
  const std::array<std::size_t, 5> dims{32, 32, 16, 16, 8};
  for (std::size_t k = 0; k < 5; ++k) {
    f.components[k].resize(dims[k]);
    for (auto& x : f.components[k]) x = scale * rng.normal();
  }
  return f;
}

AVRecord synthetic_record(Rng& rng, const std::string& id) {
  AVRecord r;
  r.point = {"s", id, "p0", rng.uniform()};
  r.material = kAllMaterials[rng.index(kMaterialCount)];
  r.visual = random_feature(rng);
  auto w = synthesize_modes(sample_modal_profile(r.material, rng), 1.0, rng.uniform(0.1, 0.9), {},
                            rng.next(), 0, 16000);
  auto clip = std::make_shared<Waveform>(normalize_and_clip(w));
  r.audio = extract_audio(*clip);
  r.waveform = clip;
  return r;
}

struct SilenceWarnings {
  std::vector<std::string> seen;
  SilenceWarnings() { set_warning_sink([this](std::string_view m) { seen.emplace_back(m); }); }
  ~SilenceWarnings() {
    set_warning_sink([](std::string_view m) {
      std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(m.size()), m.data());
    });
  }
};

}  // namespace

TEST_CASE("visual distance is a weighted sum of per-component L2 norms") {
  Rng rng(1);
  const auto a = random_feature(rng), b = random_feature(rng);
  CHECK(visual_distance(a, a, {}) == 0.0);

  WeightVector ones;
  double expected = 0.0;
  for (std::size_t k = 0; k < 5; ++k) expected += oracle::l2(a.components[k], b.components[k]);
  CHECK(visual_distance(a, b, ones) == doctest::Approx(expected).epsilon(1e-12));

  WeightVector only_obj;
  only_obj.w = {1, 0, 0, 0, 0};
  only_obj.intercept = 100.0;  // never part of the distance
  VisualFeature c = a;
  c.components[0][3] += 1.0;
  CHECK(visual_distance(a, c, only_obj) == doctest::Approx(1.0));

  VisualFeature bad = a;
  bad.components[2].pop_back();
  CHECK_THROWS_AS(visual_distance(a, bad, ones), ValidationError);
}

TEST_CASE("fit_weights recovers an exact linear law") {
  Rng rng(2);
  std::vector<WeightPair> pairs;
  for (int i = 0; i < 60; ++i) {
    WeightPair p{random_feature(rng), random_feature(rng), 0.0};
    p.mcd = 3.0 * oracle::l2(p.a.components[1], p.b.components[1]);
    pairs.push_back(p);
  }
  const auto w = fit_weights(pairs);
  for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(w.w[k] - (k == 1 ? 3.0 : 0.0)) < 1e-6);
  CHECK(std::abs(w.intercept) < 1e-6);
  CHECK(w.r_squared == doctest::Approx(1.0));
}

TEST_CASE("fit_weights is consistent under noise") {
  Rng rng(3);
  std::vector<ComponentDistances> d;
  std::vector<double> y;
  for (int i = 0; i < 500; ++i) {
    ComponentDistances row;
    for (auto& v : row) v = rng.uniform(0.0, 5.0);
    d.push_back(row);
    y.push_back(2.0 * row[4] + 0.1 * rng.normal());
  }
  SilenceWarnings quiet;
  const auto w = fit_weights(d, y);
  CHECK(std::abs(w.w[4] - 2.0) < 0.1);
  CHECK(w.r_squared > 0.9);
}

TEST_CASE("fit_weights: constants, clamping and degenerate designs") {
  Rng rng(4);
  std::vector<ComponentDistances> d;
  for (int i = 0; i < 20; ++i) {
    ComponentDistances row;
    for (auto& v : row) v = rng.uniform(0.0, 1.0);
    d.push_back(row);
  }
  const auto c = fit_weights(d, std::vector<double>(20, 7.5));
  for (double wk : c.w) CHECK(std::abs(wk) < 1e-9);
  CHECK(c.intercept == doctest::Approx(7.5));

  std::vector<double> y;
  for (const auto& row : d) y.push_back(4.0 - 2.0 * row[0] + row[2]);
  SilenceWarnings sink;
  const auto clamped = fit_weights(d, y);
  CHECK(clamped.w[0] == 0.0);
  REQUIRE(sink.seen.size() == 1);
  CHECK(sink.seen[0].find("sam_obj") != std::string::npos);

  std::vector<ComponentDistances> flat(10, ComponentDistances{1, 1, 1, 1, 1});
  CHECK_THROWS_WITH_AS(fit_weights(flat, std::vector<double>(10, 1.0)),
                       doctest::Contains("rank-deficient"), ValidationError);
  CHECK_THROWS_AS(fit_weights(std::span(d).first(5), std::span(y).first(5)), ValidationError);
}

TEST_CASE("k-NN by vision matches a brute-force scan") {
  Rng rng(5);
  AVStore store;
  for (int i = 0; i < 50; ++i) store.insert(synthetic_record(rng, "o" + std::to_string(i)));
  WeightVector w;
  w.w = {0.5, 1.0, 2.0, 0.0, 3.0};
  for (int q = 0; q < 5; ++q) {
    const auto query = random_feature(rng);
    std::vector<double> d;
    for (std::size_t i = 0; i < store.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < 5; ++k)
        s += w.w[k] * oracle::l2(query.components[k], store[i].visual.components[k]);
      d.push_back(s);
    }
    const auto expected = oracle::k_smallest(d, 5);
    const auto got = store.view().nearest_by_vision(query, w, 5);
    REQUIRE(got.size() == 5);
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(got[j].index == expected[j]);
      CHECK(got[j].distance == doctest::Approx(d[expected[j]]).epsilon(1e-12));
    }
    CHECK(&store.view().predict_audio(query, w) == &store[expected[0]]);
  }
}

TEST_CASE("k-NN by audio matches a brute-force scan and ties keep insertion order") {
  Rng rng(6);
  AVStore store;
  for (int i = 0; i < 30; ++i) store.insert(synthetic_record(rng, "o" + std::to_string(i)));
  const auto& query = store[7].audio.mfcc;
  std::vector<double> d;
  for (std::size_t i = 0; i < store.size(); ++i) d.push_back(mcd(query, store[i].audio.mfcc));
  const auto got = store.view().nearest_by_audio(query, 4);
  const auto expected = oracle::k_smallest(d, 4);
  for (std::size_t j = 0; j < 4; ++j) CHECK(got[j].index == expected[j]);
  CHECK(got[0].index == 7);
  CHECK(got[0].distance == 0.0);

  SilenceWarnings quiet;
  AVStore dup;
  AVRecord r = synthetic_record(rng, "x");
  dup.insert(r);
  dup.insert(r);
  dup.insert(r);
  CHECK(dup.size() == 3);
  CHECK(quiet.seen.size() == 2);
  const auto ties = dup.view().nearest_by_vision(r.visual, {}, 3);
  CHECK(ties[0].index == 0);
  CHECK(ties[1].index == 1);
  CHECK(ties[2].index == 2);
}

TEST_CASE("empty stores refuse queries and prefixes clamp") {
  AVStore store;
  Rng rng(7);
  const auto q = random_feature(rng);
  CHECK_THROWS_AS(store.view().nearest_by_vision(q, {}, 1), Error);
  CHECK_THROWS_AS(store.view().predict_audio(q, {}), Error);
  CHECK_THROWS_AS(store.view().nearest_by_audio(MfccMatrix{}, 1), Error);
  store.insert(synthetic_record(rng, "a"));
  CHECK(store.view(0).empty());
  CHECK(store.view(10).size() == 1);
  CHECK(store.view().nearest_by_vision(q, {}, 4).size() == 1);
}

TEST_CASE("store files round-trip losslessly") {
  Rng rng(8);
  AVStore store;
  for (int i = 0; i < 12; ++i) store.insert(synthetic_record(rng, "obj" + std::to_string(i)));
  StoreMetadata meta;
  meta.config_hash = 0x1234abcdULL;
  meta.seed = 99;
  meta.weights.w = {0.1, 0.2, 0.3, 0.4, 0.5};
  meta.weights.intercept = -1.5;
  meta.weights.r_squared = 0.75;
  const auto path = std::filesystem::temp_directory_path() / "avx_store_test.avx";
  store.save(path, meta);

  StoreMetadata got;
  const AVStore back = AVStore::load(path, &got);
  CHECK(got.config_hash == meta.config_hash);
  CHECK(got.seed == 99);
  CHECK(got.sample_rate_hz == 16000);
  CHECK(got.weights.w == meta.weights.w);
  CHECK(got.weights.intercept == meta.weights.intercept);
  CHECK(got.weights.r_squared == meta.weights.r_squared);
  REQUIRE(back.size() == store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    CHECK(back[i].point == store[i].point);
    CHECK(back[i].material == store[i].material);
    CHECK(back[i].visual == store[i].visual);
    CHECK(back[i].waveform->samples == store[i].waveform->samples);
    CHECK(back[i].audio.mfcc.values == store[i].audio.mfcc.values);
    CHECK(back[i].audio.chroma == store[i].audio.chroma);
  }

  // Saving the loaded store reproduces the same bytes.
  const auto again = std::filesystem::temp_directory_path() / "avx_store_test2.avx";
  back.save(again, got);
  std::ifstream a(path, std::ios::binary), b(again, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  CHECK(sa.substr(0, 8) == "AVXSTORE");

  // Corruption is detected.
  {
    std::ofstream out(again, std::ios::binary | std::ios::trunc);
    out << sa.substr(0, sa.size() / 2);
  }
  CHECK_THROWS_AS(AVStore::load(again), Error);
  {
    std::string bumped = sa;
    bumped[8] = 7;  // version
    std::ofstream out(again, std::ios::binary | std::ios::trunc);
    out << bumped;
  }
  CHECK_THROWS_WITH_AS(AVStore::load(again), doctest::Contains("version"), Error);
  {
    std::ofstream out(again, std::ios::binary | std::ios::trunc);
    out << "NOTASTORE-------";
  }
  CHECK_THROWS_WITH_AS(AVStore::load(again), doctest::Contains("not a store file"), Error);
  CHECK_THROWS_AS(AVStore::load(std::filesystem::temp_directory_path() / "no_such_store.avx"), Error);
  std::filesystem::remove(path);
  std::filesystem::remove(again);
}

TEST_CASE("best achievable MCD to a fixed test clip never rises as the store grows") {
  const World world = generate_world(procedural_scenario("m", 3, 0.0));
  VisualConfig quiet;
  quiet.noise_sigma = 0.0;
  const VisualExtractor ex(world, quiet);
  ExplorationConfig cfg;
  cfg.visual = quiet;
  const auto& scene = world.scenes[0];
  const InteractionPoint target{scene.scene_id, scene.objects[0].object_id,
                                scene.objects[0].parts[0].part_id, 0.5};
  const auto test = observe(target, world, ex, cfg, 1);
  AVStore store;
  double best = INFINITY;
  for (const auto& p : sample_candidates(scene, 25, 4, cfg.candidates)) {
    store.insert(observe(p, world, ex, cfg, 2));
    double now = INFINITY;
    for (const auto& r : store.view().records()) now = std::min(now, mcd(test.audio.mfcc, r.audio.mfcc));
    CHECK(now <= best);
    best = now;
  }
  // The exact test record retrieves itself at zero distance.
  store.insert(test);
  CHECK(mcd(store.view().predict_audio(test.visual, {}).audio.mfcc, test.audio.mfcc) == 0.0);
}
