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

#include "avx/scene.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace avx {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kMaterialCount> kMaterialNames = {
    "ceramic", "glass", "metal", "plastic", "rubber", "wood"};

// Ordered roughly by stiffness and damping so that material is audible.
constexpr std::array<MaterialTemplate, kMaterialCount> kTemplates = {{
    {2000.0, 5000.0, 20.0, 60.0, 4, 8},    // ceramic
    {3000.0, 7000.0, 8.0, 30.0, 2, 4},     // glass: sparse modes
    {2000.0, 6000.0, 5.0, 20.0, 6, 10},    // metal
    {500.0, 2000.0, 60.0, 150.0, 3, 6},    // plastic
    {100.0, 500.0, 150.0, 400.0, 2, 4},    // rubber
    {300.0, 1500.0, 40.0, 120.0, 4, 8},    // wood
}};

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError("scenario." + field + ": " + what);
}

std::vector<double> normal_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

ModalProfile modes_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected a list of [frequency_hz, damping_per_s, gain]");
  ModalProfile p;
  for (const auto& m : j) {
    if (!m.is_array() || m.size() != 3)
      fail(field, "each mode must be [frequency_hz, damping_per_s, gain]");
    p.modes.push_back({m[0].get<double>(), m[1].get<double>(), m[2].get<double>()});
  }
  std::sort(p.modes.begin(), p.modes.end(),
            [](const Mode& a, const Mode& b) { return a.frequency_hz < b.frequency_hz; });
  return p;
}

json modes_to_json(const ModalProfile& p) {
  json out = json::array();
  for (const auto& m : p.modes)
    out.push_back({m.frequency_hz, m.damping_per_s, m.gain});
  return out;
}

std::array<int, 2> int_pair(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) fail(field, "expected [lo, hi]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

std::string_view to_string(Material m) {
  return kMaterialNames[static_cast<std::size_t>(m)];
}

Material parse_material(std::string_view name) {
  for (std::size_t i = 0; i < kMaterialCount; ++i)
    if (kMaterialNames[i] == name) return kAllMaterials[i];
  throw ValidationError("unknown material '" + std::string(name) + "'");
}

const MaterialTemplate& material_template(Material m) {
  return kTemplates[static_cast<std::size_t>(m)];
}

ModalProfile sample_modal_profile(Material m, Rng& rng) {
  const auto& t = material_template(m);
  ModalProfile p;
  const int n = rng.integer(t.modes_lo, t.modes_hi);
  for (int i = 0; i < n; ++i) {
    Mode mode;
    mode.frequency_hz = rng.uniform(t.freq_lo_hz, t.freq_hi_hz);
    mode.damping_per_s = rng.uniform(t.damping_lo, t.damping_hi);
    mode.gain = rng.uniform(0.3, 1.0);
    p.modes.push_back(mode);
  }
  std::sort(p.modes.begin(), p.modes.end(),
            [](const Mode& a, const Mode& b) { return a.frequency_hz < b.frequency_hz; });
  return p;
}

const PartSpec* ObjectSpec::find_part(std::string_view id) const {
  for (const auto& p : parts)
    if (p.part_id == id) return &p;
  return nullptr;
}

const ObjectSpec* Scene::find_object(std::string_view id) const {
  for (const auto& o : objects)
    if (o.object_id == id) return &o;
  return nullptr;
}

std::size_t Scene::part_count() const {
  std::size_t n = 0;
  for (const auto& o : objects) n += o.parts.size();
  return n;
}

ScenarioSpec procedural_scenario(std::string environment, std::uint64_t seed,
                                 double ambiguity, const ProceduralOptions& opts) {
  if (opts.scenes < 1) fail("procedural.scenes", "must be >= 1");
  if (opts.pool_size < 1) fail("procedural.pool_size", "must be >= 1");
  if (opts.objects_per_scene[0] < 1 || opts.objects_per_scene[0] > opts.objects_per_scene[1])
    fail("procedural.objects_per_scene", "need 1 <= lo <= hi");

  ScenarioSpec spec;
  spec.environment_name = std::move(environment);
  spec.seed = seed;
  spec.ambiguity = ambiguity;
  for (int i = 0; i < opts.pool_size; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "obj%02d", i);
    spec.catalogue.push_back({id, {}, std::nullopt});
  }
  Rng rng(stream_seed(seed, "procedural"));
  for (int s = 0; s < opts.scenes; ++s) {
    SceneDescription desc;
    desc.scene_id = "scene" + std::to_string(s + 1);
    const int k = std::min(rng.integer(opts.objects_per_scene[0], opts.objects_per_scene[1]),
                           opts.pool_size);
    std::vector<std::size_t> order(static_cast<std::size_t>(opts.pool_size));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int i = 0; i < k; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) + rng.index(order.size() - static_cast<std::size_t>(i));
      std::swap(order[static_cast<std::size_t>(i)], order[j]);
    }
    std::sort(order.begin(), order.begin() + k);
    for (int i = 0; i < k; ++i)
      desc.object_refs.push_back(spec.catalogue[order[static_cast<std::size_t>(i)]].object_id);
    spec.scenes.push_back(std::move(desc));
  }
  return spec;
}

void validate(const ScenarioSpec& spec) {
  if (spec.scenes.empty()) fail("scenes", "must not be empty");
  if (!(spec.ambiguity >= 0.0 && spec.ambiguity <= 1.0))
    fail("ambiguity", "must be within [0, 1], got " + std::to_string(spec.ambiguity));
  if (spec.latent_dim == 0) fail("latent_dim", "must be >= 1");
  if (spec.parts_per_object[0] < 1 || spec.parts_per_object[0] > spec.parts_per_object[1])
    fail("parts_per_object", "need 1 <= lo <= hi");
  if (!(spec.part_spread >= 0.0)) fail("part_spread", "must be >= 0");

  std::set<std::string> ids;
  for (const auto& obj : spec.catalogue) {
    if (obj.object_id.empty()) fail("objects", "object id must not be empty");
    if (!ids.insert(obj.object_id).second)
      fail("objects", "duplicate object id '" + obj.object_id + "'");
    if (obj.size_scale && !(*obj.size_scale > 0.0))
      fail("objects." + obj.object_id + ".size_scale", "must be > 0");
    std::set<std::string> part_ids;
    for (std::size_t i = 0; i < obj.parts.size(); ++i) {
      const auto& pt = obj.parts[i];
      const std::string pid = pt.part_id.value_or("p" + std::to_string(i));
      if (!part_ids.insert(pid).second)
        fail("objects." + obj.object_id + ".parts", "duplicate part id '" + pid + "'");
      if (pt.modes) {
        const auto n = pt.modes->modes.size();
        if (n < 1 || n > kMaxModes)
          fail("objects." + obj.object_id + ".parts." + pid + ".modes",
               "need between 1 and 32 modes");
        for (const auto& m : pt.modes->modes)
          if (!(m.frequency_hz > 0.0) || !(m.damping_per_s > 0.0) || !(m.gain >= 0.0))
            fail("objects." + obj.object_id + ".parts." + pid + ".modes",
                 "frequency and damping must be > 0, gain >= 0");
      }
    }
  }
  std::set<std::string> scene_ids;
  for (std::size_t s = 0; s < spec.scenes.size(); ++s) {
    const auto& sc = spec.scenes[s];
    const std::string field = "scenes[" + std::to_string(s) + "]";
    if (!scene_ids.insert(sc.scene_id).second)
      fail(field + ".id", "duplicate scene id '" + sc.scene_id + "'");
    if (sc.random_objects < 0) fail(field + ".random_objects", "must be >= 0");
    if (sc.object_refs.empty() && sc.random_objects == 0)
      fail(field + ".objects", "scene has no objects");
    std::set<std::string> refs;
    for (const auto& r : sc.object_refs) {
      if (!ids.count(r)) fail(field + ".objects", "unknown object '" + r + "'");
      if (!refs.insert(r).second) fail(field + ".objects", "object '" + r + "' listed twice");
    }
  }
}

ScenarioSpec scenario_from_json(const json& j) {
  if (!j.is_object()) fail("", "expected a JSON object");
  ScenarioSpec spec;
  try {
    spec.environment_name = j.value("environment", std::string("environment"));
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.ambiguity = j.value("ambiguity", 0.0);
    spec.latent_dim = j.value("latent_dim", std::size_t{16});
    spec.part_spread = j.value("part_spread", 0.5);
    spec.extractor_seed = j.value("extractor_seed", spec.extractor_seed);
    if (j.contains("parts_per_object"))
      spec.parts_per_object = int_pair(j["parts_per_object"], "parts_per_object");

    if (j.contains("procedural")) {
      if (j.contains("objects") || j.contains("scenes"))
        fail("procedural", "cannot be combined with explicit objects/scenes");
      const auto& p = j["procedural"];
      ProceduralOptions opts;
      opts.scenes = p.value("scenes", opts.scenes);
      opts.pool_size = p.value("pool_size", opts.pool_size);
      if (p.contains("objects_per_scene"))
        opts.objects_per_scene = int_pair(p["objects_per_scene"], "procedural.objects_per_scene");
      auto gen = procedural_scenario(spec.environment_name, spec.seed, spec.ambiguity, opts);
      spec.catalogue = std::move(gen.catalogue);
      spec.scenes = std::move(gen.scenes);
    } else {
      for (const auto& o : j.value("objects", json::array())) {
        ObjectTemplate t;
        t.object_id = o.at("id").get<std::string>();
        if (o.contains("size_scale")) t.size_scale = o["size_scale"].get<double>();
        for (const auto& p : o.value("parts", json::array())) {
          PartTemplate pt;
          if (p.is_string()) {
            pt.material = parse_material(p.get<std::string>());
          } else {
            if (p.contains("id")) pt.part_id = p["id"].get<std::string>();
            if (p.contains("material")) pt.material = parse_material(p["material"].get<std::string>());
            if (p.contains("modes"))
              pt.modes = modes_from_json(p["modes"], "objects." + t.object_id + ".modes");
          }
          t.parts.push_back(std::move(pt));
        }
        spec.catalogue.push_back(std::move(t));
      }
      std::size_t idx = 0;
      for (const auto& s : j.value("scenes", json::array())) {
        SceneDescription d;
        d.scene_id = s.value("id", "scene" + std::to_string(++idx));
        d.object_refs = s.value("objects", std::vector<std::string>{});
        d.random_objects = s.value("random_objects", 0);
        spec.scenes.push_back(std::move(d));
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: malformed field: ") + e.what());
  }
  validate(spec);
  return spec;
}

json scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["environment"] = spec.environment_name;
  j["seed"] = spec.seed;
  j["ambiguity"] = spec.ambiguity;
  j["latent_dim"] = spec.latent_dim;
  j["part_spread"] = spec.part_spread;
  j["extractor_seed"] = spec.extractor_seed;
  j["parts_per_object"] = spec.parts_per_object;
  json objs = json::array();
  for (const auto& o : spec.catalogue) {
    json jo;
    jo["id"] = o.object_id;
    if (o.size_scale) jo["size_scale"] = *o.size_scale;
    json parts = json::array();
    for (const auto& p : o.parts) {
      json jp = json::object();
      if (p.part_id) jp["id"] = *p.part_id;
      if (p.material) jp["material"] = std::string(to_string(*p.material));
      if (p.modes) jp["modes"] = modes_to_json(*p.modes);
      parts.push_back(std::move(jp));
    }
    jo["parts"] = std::move(parts);
    objs.push_back(std::move(jo));
  }
  j["objects"] = std::move(objs);
  json scenes = json::array();
  for (const auto& s : spec.scenes)
    scenes.push_back({{"id", s.scene_id}, {"objects", s.object_refs},
                      {"random_objects", s.random_objects}});
  j["scenes"] = std::move(scenes);
  return j;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("scenario file " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

const Scene& World::scene(std::string_view id) const {
  return scenes[scene_index(id)];
}

std::size_t World::scene_index(std::string_view id) const {
  for (std::size_t i = 0; i < scenes.size(); ++i)
    if (scenes[i].scene_id == id) return i;
  throw ValidationError("unknown scene '" + std::string(id) + "'");
}

ResolvedPoint World::resolve(const InteractionPoint& p) const {
  if (!(p.u >= 0.0 && p.u <= 1.0))
    throw ValidationError("interaction point u must lie in [0, 1]");
  const Scene& s = scene(p.scene_id);
  const ObjectSpec* o = s.find_object(p.object_id);
  if (!o)
    throw ValidationError("unknown object '" + p.object_id + "' in scene '" + p.scene_id + "'");
  const PartSpec* part = o->find_part(p.part_id);
  if (!part)
    throw ValidationError("unknown part '" + p.part_id + "' on object '" + p.object_id + "'");
  return {&s, o, part};
}

World generate_world(const ScenarioSpec& spec) {
  validate(spec);
  World world;
  world.spec = spec;

  Rng centroid_rng(stream_seed(spec.seed, "centroids"));
  std::array<std::vector<double>, kMaterialCount> centroids;
  for (auto& c : centroids) c = normal_vector(centroid_rng, spec.latent_dim);

  auto make_object = [&](const ObjectTemplate& t) {
    Rng rng(stream_seed(spec.seed, "object/" + t.object_id));
    ObjectSpec obj;
    obj.object_id = t.object_id;
    obj.latent_appearance = normal_vector(rng, spec.latent_dim);
    obj.size_scale = t.size_scale ? *t.size_scale : rng.uniform(0.85, 1.1);
    std::vector<PartTemplate> parts = t.parts;
    if (parts.empty())
      parts.resize(static_cast<std::size_t>(
          rng.integer(spec.parts_per_object[0], spec.parts_per_object[1])));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& pt = parts[i];
      PartSpec part;
      part.part_id = pt.part_id.value_or("p" + std::to_string(i));
      part.material = pt.material ? *pt.material : kAllMaterials[rng.index(kMaterialCount)];
      const auto& c = centroids[static_cast<std::size_t>(part.material)];
      part.latent_appearance.resize(spec.latent_dim);
      for (std::size_t d = 0; d < spec.latent_dim; ++d)
        part.latent_appearance[d] = c[d] + spec.part_spread * rng.normal();
      part.modal_profile = pt.modes ? *pt.modes : sample_modal_profile(part.material, rng);
      obj.parts.push_back(std::move(part));
    }
    return obj;
  };

  // Unique objects in creation order: catalogue first, then scene-local ones.
  std::vector<ObjectSpec> objects;
  std::map<std::string, std::size_t> by_id;
  for (const auto& t : spec.catalogue) {
    by_id[t.object_id] = objects.size();
    objects.push_back(make_object(t));
  }
  std::vector<std::vector<std::size_t>> scene_members(spec.scenes.size());
  for (std::size_t s = 0; s < spec.scenes.size(); ++s) {
    const auto& desc = spec.scenes[s];
    for (const auto& ref : desc.object_refs) scene_members[s].push_back(by_id.at(ref));
    for (int r = 0; r < desc.random_objects; ++r) {
      ObjectTemplate t{desc.scene_id + ".r" + std::to_string(r), {}, std::nullopt};
      if (by_id.count(t.object_id))
        fail("scenes", "generated object id '" + t.object_id + "' collides with catalogue");
      by_id[t.object_id] = objects.size();
      scene_members[s].push_back(objects.size());
      objects.push_back(make_object(t));
    }
  }

  // Visually confusable pairs: with probability `ambiguity` a part takes the
  // appearance latent of an earlier part made of a different material.
  Rng amb(stream_seed(spec.seed, "ambiguity"));
  std::vector<const PartSpec*> seen;
  for (auto& obj : objects) {
    for (auto& part : obj.parts) {
      const bool share = amb.bernoulli(spec.ambiguity);
      if (share) {
        std::vector<const PartSpec*> donors;
        for (const auto* p : seen)
          if (p->material != part.material) donors.push_back(p);
        if (!donors.empty())
          part.latent_appearance = donors[amb.index(donors.size())]->latent_appearance;
      }
      seen.push_back(&part);
    }
  }

  for (std::size_t s = 0; s < spec.scenes.size(); ++s) {
    Scene scene;
    scene.scene_id = spec.scenes[s].scene_id;
    scene.candidate_sampler_seed = stream_seed(spec.seed, "candidates/" + scene.scene_id);
    for (std::size_t idx : scene_members[s]) scene.objects.push_back(objects[idx]);
    world.scenes.push_back(std::move(scene));
  }
  return world;
}

std::vector<InteractionPoint> sample_candidates(const Scene& scene, std::size_t n,
                                                std::uint64_t seed,
                                                const CandidateOptions& opts) {
  if (n == 0) throw ValidationError("sample_candidates: n must be >= 1");
  if (scene.objects.empty()) throw ValidationError("sample_candidates: scene has no objects");
  if (!(opts.u_min >= 0.0 && opts.u_max <= 1.0 && opts.u_min < opts.u_max))
    throw ValidationError("sample_candidates: need 0 <= u_min < u_max <= 1");

  double gap_lo = 0.0, gap_hi = 0.0;
  if (opts.reserved) {
    gap_lo = std::clamp(opts.reserved->first, opts.u_min, opts.u_max);
    gap_hi = std::clamp(opts.reserved->second, opts.u_min, opts.u_max);
    if (gap_hi < gap_lo) std::swap(gap_lo, gap_hi);
  }
  const double usable = (opts.u_max - opts.u_min) - (gap_hi - gap_lo);
  if (!(usable > 0.0)) throw ValidationError("sample_candidates: reserved interval covers the u range");

  Rng rng(stream_seed(seed, "candidates/" + scene.scene_id));
  std::vector<InteractionPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& obj = scene.objects[rng.index(scene.objects.size())];
    const auto& part = obj.parts[rng.index(obj.parts.size())];
    double u = opts.u_min + rng.uniform() * usable;
    if (opts.reserved && u >= gap_lo) u += gap_hi - gap_lo;
    out.push_back({scene.scene_id, obj.object_id, part.part_id, std::min(u, opts.u_max)});
  }
  return out;
}

}  // namespace avx
