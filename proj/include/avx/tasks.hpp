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

#ifndef AVX_TASKS_HPP_
#define AVX_TASKS_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "avx/exploration.hpp"
#include "avx/mlp.hpp"

namespace avx {

// ---------------------------------------------------------------------------
// Held-out test set: one strike per part per scene, u drawn from the reserved
// interval that exploration never samples.

struct TestEntry {
  InteractionPoint point;
  std::size_t scene_index = 0;
  Material label = Material::wood;
  VisualFeature visual;
  AudioFeature audio;
  std::shared_ptr<const Waveform> waveform;
};

std::vector<TestEntry> build_test_set(const World& world, const VisualExtractor& extractor,
                                      const ExplorationConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Audio prediction from vision.

struct CurvePoint {
  std::size_t samples = 0;       // store size at the snapshot
  std::size_t scene_index = 0;   // latest scene that has started
  std::size_t active_entries = 0;
  double mean_mcd = 0.0;         // +inf for an empty snapshot
};

// interval, 2*interval, ..., always ending at total.
std::vector<std::size_t> snapshot_schedule(std::size_t total, std::size_t interval);

// At each snapshot (a store prefix), every test entry whose scene has started
// (scene_start[scene] <= samples) is predicted by 1-NN retrieval and scored by
// MCD against its ground truth.
std::vector<CurvePoint> eval_audio_prediction(const AVStore& store,
                                              std::span<const std::size_t> snapshots,
                                              std::span<const std::size_t> scene_start,
                                              std::span<const TestEntry> test,
                                              const WeightVector& w);

// Sum of finite curve values (rectangle rule in units of the snapshot interval).
double curve_area(std::span<const CurvePoint> curve);

// ---------------------------------------------------------------------------
// Material classification.

enum class HeadVariant { vision_only, audio_only, audiovisual };
inline constexpr std::array<HeadVariant, 3> kAllVariants = {
    HeadVariant::vision_only, HeadVariant::audio_only, HeadVariant::audiovisual};
std::string_view to_string(HeadVariant v);

// vision_only: the five visual components; audio_only: AudioFeature::summary();
// audiovisual: both, concatenated.
std::vector<double> head_input(HeadVariant v, const VisualFeature& visual,
                               const AudioFeature& audio);

struct HeadHyper {
  std::size_t hidden = 64;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t epochs = 150;
  std::size_t batch = 16;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
};

struct LabeledData {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;  // material index
};

class ClassifierHead {
 public:
  ClassifierHead(HeadVariant variant, std::vector<double> mean, std::vector<double> scale, Mlp net);

  HeadVariant variant() const { return variant_; }
  std::array<double, kMaterialCount> predict_proba(std::span<const double> input) const;
  Material predict(std::span<const double> input) const;
  Material predict(const VisualFeature& visual, const AudioFeature& audio) const;
  const Mlp& network() const { return net_; }

 private:
  HeadVariant variant_;
  std::vector<double> mean_, scale_;  // input standardization
  Mlp net_;
};

// Inputs are standardized with training statistics, then mini-batch SGD with
// momentum on cross-entropy. Throws ValidationError with fewer than 2 classes.
ClassifierHead train_classifier(HeadVariant variant, const LabeledData& data,
                                const HeadHyper& hyper);
ClassifierHead train_head(HeadVariant variant, std::span<const AVRecord> records,
                          const HeadHyper& hyper);

// Mean per-class recall over the classes present in `truth`.
double class_balanced_accuracy(std::span<const Material> truth,
                               std::span<const Material> predicted);

struct MaterialEvalConfig {
  std::size_t runs = 20;
  std::vector<std::size_t> checkpoints;  // training-set sizes; the full set is always added
  HeadHyper hyper;
};

struct MaterialCurvePoint {
  std::size_t run = 0;
  HeadVariant variant = HeadVariant::audiovisual;
  std::size_t samples = 0;
  double accuracy = 0.0;
};

// Each run shuffles the training records and trains every variant on growing
// prefixes. Prefixes with a single class fall back to predicting that class.
std::vector<MaterialCurvePoint> eval_material(std::span<const AVRecord> training,
                                              std::span<const TestEntry> test,
                                              const MaterialEvalConfig& cfg,
                                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Audio-only imitation.

struct ImitationConfig {
  std::size_t candidates_per_part = 32;
  double u_min = 0.05;
  double u_max = 0.95;
};

struct ImitationResult {
  InteractionPoint point;
  std::size_t record = 0;  // store index of the predicted clip
  double mcd = 0.0;
};

// Samples candidate points on every part of the scene, predicts each one's
// sound by retrieval and returns the candidate whose prediction is closest
// (MCD) to the demonstration. `demo` is a raw recording; it is clipped and
// normalized here.
ImitationResult imitate_note(const Waveform& demo, StoreView store, const Scene& scene,
                             const VisualExtractor& extractor, const WeightVector& w,
                             const ExplorationConfig& cfg, const ImitationConfig& icfg,
                             std::uint64_t seed);

struct ActivityConfig {
  std::size_t points_per_object = 8;
};

// Low-level superposition matcher: candidate c scores
// min_{i,j} mcd(superimpose(candidate_clips[c][i], placement_clips[j]), demo).
// Returns the argmin candidate index (lowest index on ties).
std::size_t match_superposition(const MfccMatrix& demo,
                                const std::vector<std::vector<const Waveform*>>& candidate_clips,
                                const std::vector<const Waveform*>& placement_clips,
                                const MfccConfig& mfcc);

// Which of `picked` was placed on the known `placement` object. Clip sets per
// object are the store's own strikes on it plus retrieval predictions at
// sampled points. Throws ValidationError listing objects the store never struck.
std::string infer_picked_object(const Waveform& demo, std::span<const std::string> picked,
                                const std::string& placement, StoreView store,
                                const Scene& scene, const VisualExtractor& extractor,
                                const WeightVector& w, const ExplorationConfig& cfg,
                                const ActivityConfig& acfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Built-in task scenes.

// One object with 8 wooden bars whose modal frequencies step geometrically.
ScenarioSpec xylophone_scenario(std::uint64_t seed = 101);
// Three single-part drums.
ScenarioSpec drums_scenario(std::uint64_t seed = 202);
// Six single-part objects, one per material, plus a ceramic "plate".
ScenarioSpec activity_scenario(std::uint64_t seed = 303);

struct DemoConfig {
  double energy_lo = 0.5;
  double energy_hi = 2.0;
  double noise_level = 0.01;
  double u_lo = 0.15;
  double u_hi = 0.85;
};

struct MusicTrial {
  InteractionPoint truth;
  InteractionPoint predicted;
  double energy = 1.0;
  bool correct = false;
};

struct MusicReport {
  std::string instrument;
  std::vector<MusicTrial> trials;
  double accuracy = 0.0;
};

// Explores the instrument scene with the curiosity policy (`budget` strikes),
// then imitates `demos` perturbed human strikes. A note is the struck part.
// The robot's own strikes are recorded at the demo noise level: both come
// from the same room, and a noiseless store against noisy demos compares
// log-floored empty bands instead of timbre.
MusicReport run_music_imitation(const ScenarioSpec& instrument, std::size_t budget,
                                std::size_t demos, const DemoConfig& demo_cfg,
                                const ExplorationConfig& cfg, const WeightVector& w,
                                std::uint64_t seed);

struct ActivityTrial {
  std::string truth;
  std::string predicted;
  bool correct = false;
};

struct ActivityReport {
  std::vector<ActivityTrial> trials;
  std::size_t correct = 0;
  double accuracy = 0.0;
  double p_value = 1.0;  // binomial test against 1/|picked| chance
};

ActivityReport run_activity_recognition(const ScenarioSpec& scenario, std::size_t budget,
                                        std::size_t trials, const DemoConfig& demo_cfg,
                                        const ExplorationConfig& cfg, const WeightVector& w,
                                        std::uint64_t seed);

// P(X >= k) for X ~ Binomial(n, p).
double binomial_upper_tail(std::size_t n, std::size_t k, double p);

// ---------------------------------------------------------------------------

// Fits visual-distance weights on a held-out synthetic world (fresh objects
// and seeds, same extractor maps as `like`): `pairs` strike pairs split evenly
// between same-part, same-material and unrelated pairs.
WeightVector pretrain_weights(const ScenarioSpec& like, const ExplorationConfig& cfg,
                              std::size_t pairs, std::uint64_t seed);

}  // namespace avx

#endif  // AVX_TASKS_HPP_
