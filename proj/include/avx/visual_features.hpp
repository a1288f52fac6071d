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

#ifndef AVX_VISUAL_FEATURES_HPP_
#define AVX_VISUAL_FEATURES_HPP_

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "avx/scene.hpp"

namespace avx {

// Feature families of the five-component visual embedding: mask embeddings
// of object and part, appearance of object crop, part crop and local patch.
enum class VisualComponent : std::size_t { sam_obj, sam_part, rn_obj, rn_part, rn_patch };
inline constexpr std::size_t kVisualComponents = 5;
std::string_view to_string(VisualComponent c);

struct VisualConfig {
  std::array<std::size_t, kVisualComponents> dims{32, 32, 16, 16, 8};
  double noise_sigma = 0.05;  // observation noise on the appearance channels
};

struct VisualFeature {
  std::array<std::vector<double>, kVisualComponents> components;

  const std::vector<double>& operator[](VisualComponent c) const {
    return components[static_cast<std::size_t>(c)];
  }
  std::vector<double>& operator[](VisualComponent c) {
    return components[static_cast<std::size_t>(c)];
  }
  std::vector<double> concatenated() const;
  std::size_t size() const;
  bool operator==(const VisualFeature&) const = default;
};

// Simulated extractor. The linear maps are fixed per world (seeded from the
// world's extractor seed); only the observation noise varies per call.
class VisualExtractor {
 public:
  VisualExtractor(const World& world, VisualConfig cfg = {});

  VisualFeature extract(const InteractionPoint& point, std::uint64_t seed) const;
  const VisualConfig& config() const { return cfg_; }

 private:
  struct Map {
    std::size_t rows = 0, cols = 0;
    std::vector<double> w;
    std::vector<double> apply(const std::vector<double>& x) const;
  };
  const World* world_;
  VisualConfig cfg_;
  std::array<Map, kVisualComponents> maps_;
};

VisualFeature extract_visual(const InteractionPoint& point, const World& world,
                             std::uint64_t seed, const VisualConfig& cfg = {});

}  // namespace avx

#endif  // AVX_VISUAL_FEATURES_HPP_
