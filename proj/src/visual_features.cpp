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

#include "avx/visual_features.hpp"

#include <cmath>
#include <numbers>

namespace avx {

std::string_view to_string(VisualComponent c) {
  static constexpr std::array<std::string_view, kVisualComponents> names = {
      "sam_obj", "sam_part", "rn_obj", "rn_part", "rn_patch"};
  return names[static_cast<std::size_t>(c)];
}

std::vector<double> VisualFeature::concatenated() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& c : components) out.insert(out.end(), c.begin(), c.end());
  return out;
}

std::size_t VisualFeature::size() const {
  std::size_t n = 0;
  for (const auto& c : components) n += c.size();
  return n;
}

std::vector<double> VisualExtractor::Map::apply(const std::vector<double>& x) const {
  std::vector<double> y(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += w[r * cols + c] * x[c];
    y[r] = acc;
  }
  return y;
}

VisualExtractor::VisualExtractor(const World& world, VisualConfig cfg)
    : world_(&world), cfg_(cfg) {
  if (!(cfg_.noise_sigma >= 0.0)) throw ValidationError("visual noise sigma must be >= 0");
  const std::size_t latent = world.spec.latent_dim;
  for (std::size_t k = 0; k < kVisualComponents; ++k) {
    if (cfg_.dims[k] == 0) throw ValidationError("visual component dimensions must be >= 1");
    Map& m = maps_[k];
    m.rows = cfg_.dims[k];
    // The patch map also sees the 3-d encoding of u.
    m.cols = k == static_cast<std::size_t>(VisualComponent::rn_patch) ? latent + 3 : latent;
    Rng rng(stream_seed(world.spec.extractor_seed,
                        "visual-map/" + std::string(to_string(static_cast<VisualComponent>(k))) +
                            "/" + std::to_string(latent)));
    const double scale = 1.0 / std::sqrt(static_cast<double>(m.cols));
    m.w.resize(m.rows * m.cols);
    for (auto& x : m.w) x = scale * rng.normal();
  }
}

VisualFeature VisualExtractor::extract(const InteractionPoint& point, std::uint64_t seed) const {
  const auto r = world_->resolve(point);
  const auto& obj = r.object->latent_appearance;
  const auto& part = r.part->latent_appearance;

  VisualFeature f;
  using VC = VisualComponent;
  f[VC::sam_obj] = maps_[0].apply(obj);
  f[VC::sam_part] = maps_[1].apply(part);
  f[VC::rn_obj] = maps_[2].apply(obj);
  f[VC::rn_part] = maps_[3].apply(part);
  std::vector<double> patch_in = part;
  const double tau = 2.0 * std::numbers::pi * point.u;
  patch_in.push_back(std::sin(tau));
  patch_in.push_back(std::cos(tau));
  patch_in.push_back(point.u);
  f[VC::rn_patch] = maps_[4].apply(patch_in);

  if (cfg_.noise_sigma > 0.0) {
    Rng rng(stream_seed(seed, "visual-noise"));
    for (auto c : {VC::rn_obj, VC::rn_part})
      for (auto& x : f[c]) x += cfg_.noise_sigma * rng.normal();
  }
  return f;
}

VisualFeature extract_visual(const InteractionPoint& point, const World& world,
                             std::uint64_t seed, const VisualConfig& cfg) {
  return VisualExtractor(world, cfg).extract(point, seed);
}

}  // namespace avx
