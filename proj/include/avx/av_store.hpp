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

#ifndef AVX_AV_STORE_HPP_
#define AVX_AV_STORE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <unordered_set>
#include <vector>

#include "avx/audio_features.hpp"
#include "avx/visual_features.hpp"

namespace avx {

// Per-component weights of the visual distance. The intercept comes from the
// regression fit and is never part of the distance itself.
struct WeightVector {
  std::array<double, kVisualComponents> w{1.0, 1.0, 1.0, 1.0, 1.0};
  double intercept = 0.0;
  double r_squared = 0.0;  // on the fitting pairs

  double operator[](VisualComponent c) const { return w[static_cast<std::size_t>(c)]; }
};

using ComponentDistances = std::array<double, kVisualComponents>;

// L2 distance per component. Throws ValidationError on dimension mismatch.
ComponentDistances component_distances(const VisualFeature& a, const VisualFeature& b);

// sum_k w_k * ||a_k - b_k||_2
double visual_distance(const VisualFeature& a, const VisualFeature& b, const WeightVector& w);

struct WeightPair {
  VisualFeature a;
  VisualFeature b;
  double mcd = 0.0;
};

// Ordinary least squares of MCD on the five component distances plus an
// intercept. Negative weights are clamped to zero (with a warning) so the
// result stays a valid distance. Needs >= 6 pairs and a full-rank design.
WeightVector fit_weights(std::span<const WeightPair> pairs);
WeightVector fit_weights(std::span<const ComponentDistances> distances,
                         std::span<const double> mcd_values);

struct AVRecord {
  InteractionPoint point;
  Material material = Material::wood;  // annotation label
  VisualFeature visual;
  AudioFeature audio;
  std::shared_ptr<const Waveform> waveform;  // the clipped, normalized clip
};

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
  bool operator==(const Neighbor&) const = default;
};

// Read-only window onto the first n records of a store. Invalidated by the
// next insert into the owning store.
class StoreView {
 public:
  StoreView() = default;
  explicit StoreView(std::span<const AVRecord> records) : records_(records) {}

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const AVRecord& operator[](std::size_t i) const { return records_[i]; }
  std::span<const AVRecord> records() const { return records_; }

  // Exact k-NN by linear scan, ascending distance; ties keep insertion order.
  std::vector<Neighbor> nearest_by_vision(const VisualFeature& query, const WeightVector& w,
                                          std::size_t k) const;
  std::vector<Neighbor> nearest_by_audio(const MfccMatrix& query, std::size_t k) const;

  // 1-NN exemplar retrieval by vision.
  const AVRecord& predict_audio(const VisualFeature& query, const WeightVector& w) const;

 private:
  std::span<const AVRecord> records_;
};

struct StoreMetadata {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int sample_rate_hz = 16000;
  WeightVector weights;
};

class AVStore {
 public:
  // Append-only. Duplicate points are accepted and logged.
  std::size_t insert(AVRecord record);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const AVRecord& operator[](std::size_t i) const { return records_[i]; }

  StoreView view() const { return StoreView(records_); }
  StoreView view(std::size_t prefix) const;

  // Binary on-disk format, version 1 (see README). Audio features are
  // recomputed from the stored clips on load.
  void save(const std::filesystem::path& path, const StoreMetadata& meta) const;
  static AVStore load(const std::filesystem::path& path, StoreMetadata* meta = nullptr,
                      const MfccConfig& mfcc = {});

 private:
  std::vector<AVRecord> records_;
  std::unordered_set<std::string> point_keys_;
};

inline constexpr std::uint32_t kStoreFormatVersion = 1;

}  // namespace avx

#endif  // AVX_AV_STORE_HPP_
