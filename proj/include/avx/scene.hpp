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

#ifndef AVX_SCENE_HPP_
#define AVX_SCENE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "avx/common.hpp"
#include "json.hpp"

namespace avx {

enum class Material : std::uint8_t { ceramic, glass, metal, plastic, rubber, wood };

inline constexpr std::size_t kMaterialCount = 6;
inline constexpr std::array<Material, kMaterialCount> kAllMaterials = {
    Material::ceramic, Material::glass,  Material::metal,
    Material::plastic, Material::rubber, Material::wood};

std::string_view to_string(Material m);
Material parse_material(std::string_view name);

struct Mode {
  double frequency_hz = 0.0;
  double damping_per_s = 0.0;
  double gain = 0.0;
};

// Resonant modes of one part, ordered by ascending frequency. Mode index m
// (1-based) sets the spatial gain law |sin(pi * m * u)|.
struct ModalProfile {
  std::vector<Mode> modes;
};

inline constexpr std::size_t kMaxModes = 32;

// Per-material ranges the modal profiles are drawn from.
struct MaterialTemplate {
  double freq_lo_hz, freq_hi_hz;
  double damping_lo, damping_hi;
  int modes_lo, modes_hi;
};
const MaterialTemplate& material_template(Material m);
ModalProfile sample_modal_profile(Material m, Rng& rng);

struct PartSpec {
  std::string part_id;
  Material material = Material::wood;
  std::vector<double> latent_appearance;
  ModalProfile modal_profile;
  std::array<double, 2> extent{0.0, 1.0};
};

struct ObjectSpec {
  std::string object_id;
  std::vector<double> latent_appearance;
  double size_scale = 1.0;
  std::vector<PartSpec> parts;

  const PartSpec* find_part(std::string_view id) const;
};

struct InteractionPoint {
  std::string scene_id;
  std::string object_id;
  std::string part_id;
  double u = 0.0;

  bool operator==(const InteractionPoint&) const = default;
};

struct Scene {
  std::string scene_id;
  std::vector<ObjectSpec> objects;
  std::uint64_t candidate_sampler_seed = 0;

  const ObjectSpec* find_object(std::string_view id) const;
  std::size_t part_count() const;
};

// ---------------------------------------------------------------------------
// Declarative scenario description.

struct PartTemplate {
  std::optional<std::string> part_id;
  std::optional<Material> material;
  std::optional<ModalProfile> modes;
};

// An object in the scenario catalogue. Referencing the same catalogue entry
// from several scenes makes it a recurring object: every scene gets the
// identical ObjectSpec. Empty `parts` means "draw 1..N random parts".
struct ObjectTemplate {
  std::string object_id;
  std::vector<PartTemplate> parts;
  std::optional<double> size_scale;
};

struct SceneDescription {
  std::string scene_id;
  std::vector<std::string> object_refs;  // catalogue ids, recurring
  int random_objects = 0;                // fresh, scene-local objects
};

struct ScenarioSpec {
  std::string environment_name = "environment";
  std::vector<ObjectTemplate> catalogue;
  std::vector<SceneDescription> scenes;
  double ambiguity = 0.0;
  std::uint64_t seed = 0;
  std::size_t latent_dim = 16;
  std::array<int, 2> parts_per_object{1, 4};
  double part_spread = 0.5;  // within-material latent spread
  // Seed of the fixed visual feature maps. Shared across worlds by default so
  // that weights fitted on one world transfer to another.
  std::uint64_t extractor_seed = 0x5eedf00dULL;
};

struct ProceduralOptions {
  int scenes = 5;
  int pool_size = 12;
  std::array<int, 2> objects_per_scene{4, 8};
};

// Expands a procedural layout into an explicit ScenarioSpec: a catalogue of
// `pool_size` random objects, each scene drawing 4..8 of them without
// replacement, so objects recur across scenes.
ScenarioSpec procedural_scenario(std::string environment, std::uint64_t seed,
                                 double ambiguity,
                                 const ProceduralOptions& opts = {});

void validate(const ScenarioSpec& spec);

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec load_scenario(const std::filesystem::path& path);

struct ResolvedPoint {
  const Scene* scene;
  const ObjectSpec* object;
  const PartSpec* part;
};

struct World {
  ScenarioSpec spec;
  std::vector<Scene> scenes;
  int sample_rate_hz = 16000;

  const Scene& scene(std::string_view id) const;
  std::size_t scene_index(std::string_view id) const;
  // Throws ValidationError if any id is unknown or u is outside [0, 1].
  ResolvedPoint resolve(const InteractionPoint& p) const;
};

// Pure function of the spec (its seed included).
World generate_world(const ScenarioSpec& spec);

struct CandidateOptions {
  double u_min = 0.0;
  double u_max = 1.0;
  // Sub-interval excluded from sampling (held out for test strikes).
  std::optional<std::pair<double, double>> reserved;
};

// n points: object uniform, then part uniform within the object, then u
// uniform over [u_min, u_max] minus the reserved interval.
std::vector<InteractionPoint> sample_candidates(const Scene& scene,
                                                std::size_t n,
                                                std::uint64_t seed,
                                                const CandidateOptions& opts = {});

}  // namespace avx

#endif  // AVX_SCENE_HPP_
