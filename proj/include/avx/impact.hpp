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

#ifndef AVX_IMPACT_HPP_
#define AVX_IMPACT_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "avx/scene.hpp"

namespace avx {

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  double peak() const;
};

// energy = 1 models the tool's repeatable strike; human demonstrations vary it.
struct StrikeParams {
  double energy = 1.0;
  double noise_level = 0.0;
};

struct SynthesisOptions {
  double duration_s = 0.4;
  double preroll_s = 0.05;  // silence before the strike
  double click_s = 0.005;
  double click_gain = 0.3;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

// Ground-truth impact: energy * (sum of damped modes with spatial gain
// |sin(pi*m*u)| + contact click) + white noise. The click depends only on the
// struck part, so with noise_level = 0 the same (part, u) always sounds the
// same up to energy. `seed` drives the background noise only.
// Returned unnormalized.
Waveform synthesize_impact(const InteractionPoint& point, const World& world,
                           const StrikeParams& strike, std::uint64_t seed,
                           const SynthesisOptions& opts = {});

Waveform synthesize_modes(const ModalProfile& profile, double size_scale, double u,
                          const StrikeParams& strike, std::uint64_t click_seed,
                          std::uint64_t noise_seed, int sample_rate_hz,
                          const SynthesisOptions& opts = {});

// Sample-wise sum (shorter input zero-extended), renormalized to unit peak.
Waveform superimpose(const Waveform& a, const Waveform& b);

// 16-bit PCM mono RIFF/WAVE. Samples are clamped to [-1, 1].
void write_wav(const Waveform& w, const std::filesystem::path& path);

}  // namespace avx

#endif  // AVX_IMPACT_HPP_
