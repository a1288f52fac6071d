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

#ifndef AVX_EXPLORATION_HPP_
#define AVX_EXPLORATION_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "avx/av_store.hpp"
#include "avx/impact.hpp"

namespace avx {

enum class PolicyKind { random, cycling, curiosity };
std::string_view to_string(PolicyKind p);
PolicyKind parse_policy(std::string_view name);

inline constexpr double kInfiniteNovelty = std::numeric_limits<double>::infinity();

// min over stored records of the weighted visual distance; +inf when empty.
double novelty(const VisualFeature& candidate, StoreView store, const WeightVector& w);

class ExplorationState {
 public:
  ExplorationState(PolicyKind policy, const AVStore& store, WeightVector weights,
                   std::uint64_t seed);

  // Visit counters are per scene; they reset here.
  void begin_scene(const Scene& scene);
  // Call once the strike on `point` has been inserted into the store.
  void record_strike(const InteractionPoint& point);

  std::size_t visits(const std::string& object_id) const;
  std::size_t min_visits() const;
  PolicyKind policy() const { return policy_; }
  const AVStore& store() const { return *store_; }
  const WeightVector& weights() const { return weights_; }
  Rng& rng() { return rng_; }

 private:
  PolicyKind policy_;
  const AVStore* store_;
  WeightVector weights_;
  Rng rng_;
  std::map<std::string, std::size_t> visits_;
};

struct Selection {
  std::size_t index = 0;
  double novelty = 0.0;
};

// Curiosity: among candidates on the least-visited objects, the one with the
// largest novelty (lowest index on ties; uniform among them if all are +inf).
// Cycling: same restriction, uniform choice. Random: uniform over all.
Selection select_next(ExplorationState& state, std::span<const InteractionPoint> candidates,
                      std::span<const VisualFeature> features);

struct ExplorationConfig {
  std::size_t budget_per_scene = 40;
  std::size_t candidates_per_step = 64;
  CandidateOptions candidates{0.05, 0.95, std::pair{0.45, 0.55}};
  StrikeParams strike;
  SynthesisOptions synthesis;
  VisualConfig visual;
  ClipConfig clip;
  MfccConfig mfcc;
};

struct StepLog {
  std::size_t step = 0;
  std::string scene;
  std::string object;
  std::string part;
  double u = 0.0;
  PolicyKind policy = PolicyKind::curiosity;
  double novelty = 0.0;
  std::size_t store_size = 0;
};

struct Trajectory {
  AVStore store;
  std::vector<StepLog> steps;
  std::vector<std::size_t> scene_start;  // first step index of each scene
};

// Strike one point: synthesize, clip, featurize. Shared by exploration and
// the downstream tasks.
AVRecord observe(const InteractionPoint& point, const World& world,
                 const VisualExtractor& extractor, const ExplorationConfig& cfg,
                 std::uint64_t seed);

Trajectory run_exploration(const World& world, PolicyKind policy, const ExplorationConfig& cfg,
                           const WeightVector& weights, std::uint64_t seed);

// CSV: step,scene,object,part,u,policy,novelty,store_size
void write_step_log(std::ostream& out, std::span<const StepLog> steps);

}  // namespace avx

#endif  // AVX_EXPLORATION_HPP_
