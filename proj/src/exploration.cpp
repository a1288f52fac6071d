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

#include "avx/exploration.hpp"

#include <algorithm>
#include <cstdio>

namespace avx {

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::random: return "random";
    case PolicyKind::cycling: return "cycling";
    case PolicyKind::curiosity: return "curiosity";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "random") return PolicyKind::random;
  if (s == "cycling") return PolicyKind::cycling;
  if (s == "curiosity") return PolicyKind::curiosity;
  throw ValidationError("unknown policy '" + std::string(name) +
                        "' (expected random, cycling or curiosity)");
}

double novelty(const VisualFeature& candidate, StoreView store, const WeightVector& w) {
  double best = kInfiniteNovelty;
  for (const auto& r : store.records()) best = std::min(best, visual_distance(candidate, r.visual, w));
  return best;
}

ExplorationState::ExplorationState(PolicyKind policy, const AVStore& store,
                                   WeightVector weights, std::uint64_t seed)
    : policy_(policy), store_(&store), weights_(weights), rng_(stream_seed(seed, "policy")) {}

void ExplorationState::begin_scene(const Scene& scene) {
  visits_.clear();
  for (const auto& o : scene.objects) visits_[o.object_id] = 0;
}

void ExplorationState::record_strike(const InteractionPoint& point) { ++visits_[point.object_id]; }

std::size_t ExplorationState::visits(const std::string& object_id) const {
  auto it = visits_.find(object_id);
  return it == visits_.end() ? 0 : it->second;
}

std::size_t ExplorationState::min_visits() const {
  std::size_t m = SIZE_MAX;
  for (const auto& [id, n] : visits_) m = std::min(m, n);
  return m == SIZE_MAX ? 0 : m;
}

Selection select_next(ExplorationState& state, std::span<const InteractionPoint> candidates,
                      std::span<const VisualFeature> features) {
  if (candidates.empty()) throw ValidationError("select_next: empty candidate list");
  if (features.size() != candidates.size())
    throw ValidationError("select_next: one visual feature per candidate required");
  const StoreView store = state.store().view();

  if (state.policy() == PolicyKind::random) {
    const std::size_t i = state.rng().index(candidates.size());
    return {i, novelty(features[i], store, state.weights())};
  }

  // Cycling rule: only objects with the fewest strikes so far in this scene.
  std::size_t least = SIZE_MAX;
  for (const auto& c : candidates) least = std::min(least, state.visits(c.object_id));
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (state.visits(candidates[i].object_id) == least) eligible.push_back(i);

  if (state.policy() == PolicyKind::cycling) {
    const std::size_t i = eligible[state.rng().index(eligible.size())];
    return {i, novelty(features[i], store, state.weights())};
  }

  Selection best{eligible.front(), -1.0};
  std::vector<std::size_t> unbounded;
  for (std::size_t i : eligible) {
    const double u = novelty(features[i], store, state.weights());
    if (u == kInfiniteNovelty) unbounded.push_back(i);
    if (u > best.novelty) best = {i, u};
  }
  if (unbounded.size() > 1) best.index = unbounded[state.rng().index(unbounded.size())];
  return best;
}

AVRecord observe(const InteractionPoint& point, const World& world,
                 const VisualExtractor& extractor, const ExplorationConfig& cfg,
                 std::uint64_t seed) {
  AVRecord rec;
  rec.point = point;
  rec.material = world.resolve(point).part->material;
  rec.visual = extractor.extract(point, stream_seed(seed, "visual"));
  auto clip = normalize_and_clip(
      synthesize_impact(point, world, cfg.strike, stream_seed(seed, "strike"), cfg.synthesis),
      cfg.clip);
  rec.audio = extract_audio(clip, cfg.mfcc);
  rec.waveform = std::make_shared<const Waveform>(std::move(clip));
  return rec;
}

Trajectory run_exploration(const World& world, PolicyKind policy, const ExplorationConfig& cfg,
                           const WeightVector& weights, std::uint64_t seed) {
  if (cfg.budget_per_scene < 1) throw ValidationError("budget_per_scene must be >= 1");
  if (cfg.candidates_per_step < 1) throw ValidationError("candidates_per_step must be >= 1");
  const VisualExtractor extractor(world, cfg.visual);
  Trajectory traj;
  ExplorationState state(policy, traj.store, weights, seed);
  std::size_t step = 0;
  for (const auto& scene : world.scenes) {
    traj.scene_start.push_back(step);
    state.begin_scene(scene);
    for (std::size_t b = 0; b < cfg.budget_per_scene; ++b, ++step) {
      const std::string tag = scene.scene_id + "/" + std::to_string(step);
      auto candidates = sample_candidates(
          scene, cfg.candidates_per_step, stream_seed(seed, "candidates/" + tag), cfg.candidates);
      if (policy != PolicyKind::random) {
        // Least-visited objects that drew no candidate get a few of their own.
        Scene missing{scene.scene_id, {}, scene.candidate_sampler_seed};
        for (const auto& o : scene.objects) {
          if (state.visits(o.object_id) != state.min_visits()) continue;
          const bool present = std::any_of(candidates.begin(), candidates.end(),
                                           [&](const auto& c) { return c.object_id == o.object_id; });
          if (!present) missing.objects.push_back(o);
        }
        if (!missing.objects.empty()) {
          const auto extra = sample_candidates(missing, 8 * missing.objects.size(),
                                               stream_seed(seed, "topup/" + tag), cfg.candidates);
          candidates.insert(candidates.end(), extra.begin(), extra.end());
        }
      }
      std::vector<VisualFeature> features;
      features.reserve(candidates.size());
      for (std::size_t i = 0; i < candidates.size(); ++i)
        features.push_back(extractor.extract(
            candidates[i], stream_seed(seed, "visual/" + tag + "/" + std::to_string(i))));

      const Selection sel = select_next(state, candidates, features);
      const auto& point = candidates[sel.index];

      AVRecord rec = observe(point, world, extractor, cfg, stream_seed(seed, "strike/" + tag));
      rec.visual = features[sel.index];  // what the policy saw
      const std::size_t size = traj.store.insert(std::move(rec));
      state.record_strike(point);

      traj.steps.push_back({step, scene.scene_id, point.object_id, point.part_id, point.u,
                            policy, sel.novelty, size});
    }
  }
  return traj;
}

void write_step_log(std::ostream& out, std::span<const StepLog> steps) {
  out << "step,scene,object,part,u,policy,novelty,store_size\n";
  char buf[64];
  for (const auto& s : steps) {
    out << s.step << ',' << s.scene << ',' << s.object << ',' << s.part << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", s.u);
    out << buf << ',' << to_string(s.policy) << ',';
    if (s.novelty == kInfiniteNovelty) {
      out << "inf";
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", s.novelty);
      out << buf;
    }
    out << ',' << s.store_size << '\n';
  }
}

}  // namespace avx
