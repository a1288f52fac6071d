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

#include "avx/tasks.hpp"
#include "avx/visual_features.hpp"
#include "doctest.h"

using namespace avx;

namespace {

World small_world(double ambiguity = 0.0, std::uint64_t seed = 2) {
  return generate_world(procedural_scenario("v", seed, ambiguity));
}

InteractionPoint first_point(const World& w, double u = 0.3) {
  const auto& s = w.scenes[0];
  return {s.scene_id, s.objects[0].object_id, s.objects[0].parts[0].part_id, u};
}

}  // namespace

TEST_CASE("component dimensions follow the config") {
  const World w = small_world();
  const auto f = extract_visual(first_point(w), w, 1);
  CHECK(f[VisualComponent::sam_obj].size() == 32);
  CHECK(f[VisualComponent::sam_part].size() == 32);
  CHECK(f[VisualComponent::rn_obj].size() == 16);
  CHECK(f[VisualComponent::rn_part].size() == 16);
  CHECK(f[VisualComponent::rn_patch].size() == 8);
  CHECK(f.size() == 104);
  CHECK(f.concatenated().size() == 104);

  VisualConfig cfg;
  cfg.dims = {4, 5, 6, 7, 3};
  CHECK(extract_visual(first_point(w), w, 1, cfg).size() == 25);
  cfg.dims[2] = 0;
  CHECK_THROWS_AS(VisualExtractor(w, cfg), ValidationError);
}

TEST_CASE("observation noise touches only the appearance channels") {
  const World w = small_world();
  const VisualExtractor ex(w);
  const auto p = first_point(w);
  const auto a = ex.extract(p, 1), b = ex.extract(p, 2), c = ex.extract(p, 1);
  CHECK(a == c);
  CHECK(a[VisualComponent::sam_obj] == b[VisualComponent::sam_obj]);
  CHECK(a[VisualComponent::sam_part] == b[VisualComponent::sam_part]);
  CHECK(a[VisualComponent::rn_patch] == b[VisualComponent::rn_patch]);
  CHECK(a[VisualComponent::rn_obj] != b[VisualComponent::rn_obj]);
  CHECK(a[VisualComponent::rn_part] != b[VisualComponent::rn_part]);

  // The noise has the configured scale.
  VisualConfig quiet;
  quiet.noise_sigma = 0.0;
  const auto clean = VisualExtractor(w, quiet).extract(p, 1);
  double sq = 0.0;
  std::size_t n = 0;
  for (auto comp : {VisualComponent::rn_obj, VisualComponent::rn_part})
    for (std::size_t i = 0; i < a[comp].size(); ++i, ++n)
      sq += std::pow(a[comp][i] - clean[comp][i], 2);
  CHECK(std::sqrt(sq / static_cast<double>(n)) == doctest::Approx(0.05).epsilon(0.5));
  CHECK(VisualExtractor(w, quiet).extract(p, 9) == clean);
}

TEST_CASE("the patch channel moves with u, the others do not") {
  VisualConfig quiet;
  quiet.noise_sigma = 0.0;
  const World w = small_world();
  const VisualExtractor ex(w, quiet);
  const auto a = ex.extract(first_point(w, 0.2), 0), b = ex.extract(first_point(w, 0.7), 0);
  CHECK(a[VisualComponent::rn_patch] != b[VisualComponent::rn_patch]);
  for (auto c : {VisualComponent::sam_obj, VisualComponent::sam_part, VisualComponent::rn_obj,
                 VisualComponent::rn_part})
    CHECK(a[c] == b[c]);
}

TEST_CASE("extractor maps are shared across worlds with the same extractor seed") {
  VisualConfig quiet;
  quiet.noise_sigma = 0.0;
  ScenarioSpec s1, s2;
  for (ScenarioSpec* s : {&s1, &s2}) {
    s->catalogue.push_back({"o", {{"p", Material::wood, std::nullopt}}, std::nullopt});
    s->scenes.push_back({"s", {"o"}, 0});
  }
  s1.seed = 1;
  s2.seed = 2;
  const World w1 = generate_world(s1);
  World w2 = generate_world(s2);
  const InteractionPoint p{"s", "o", "p", 0.5};
  const auto f1 = VisualExtractor(w1, quiet).extract(p, 0);
  CHECK(VisualExtractor(w2, quiet).extract(p, 0) != f1);

  // Same latents in a different world give the same features.
  auto& o2 = w2.scenes[0].objects[0];
  o2.latent_appearance = w1.scenes[0].objects[0].latent_appearance;
  o2.parts[0].latent_appearance = w1.scenes[0].objects[0].parts[0].latent_appearance;
  CHECK(VisualExtractor(w2, quiet).extract(p, 0) == f1);

  ScenarioSpec s3 = s1;
  s3.extractor_seed = 77;
  CHECK(VisualExtractor(generate_world(s3), quiet).extract(p, 0) != f1);
}

TEST_CASE("noiseless unambiguous world is linearly separable by material") {
  VisualConfig quiet;
  quiet.noise_sigma = 0.0;
  const World w = small_world(0.0, 5);
  const VisualExtractor ex(w, quiet);
  LabeledData data;
  for (const auto& s : w.scenes)
    for (const auto& o : s.objects)
      for (const auto& p : o.parts)
        for (double u : {0.1, 0.5, 0.9}) {
          const auto f = ex.extract({s.scene_id, o.object_id, p.part_id, u}, 0);
          data.inputs.push_back(f.concatenated());
          data.labels.push_back(static_cast<int>(p.material));
        }
  HeadHyper h;
  h.epochs = 200;
  h.seed = 3;
  const auto head = train_classifier(HeadVariant::vision_only, data, h);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.inputs.size(); ++i)
    correct += static_cast<int>(head.predict(data.inputs[i])) == data.labels[i] ? 1 : 0;
  CHECK(correct == data.inputs.size());
}
