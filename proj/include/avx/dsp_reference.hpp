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

#ifndef AVX_DSP_REFERENCE_HPP_
#define AVX_DSP_REFERENCE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "avx/audio_features.hpp"

namespace avx {

// Slow, literal MFCC: direct DFT summation per bin, filter weights evaluated
// per bin from the HTK formula, DCT-II by definition. Shares no code with
// compute_mfcc and uses its own hard-coded constants (it ignores the mel
// constants in MfccConfig), so a perturbed pipeline constant shows up as a
// mismatch.
MfccMatrix reference_mfcc(const Waveform& w, const MfccConfig& cfg = {});

struct DspCheck {
  std::string name;
  bool passed = false;
  double error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

// Built-in DSP self test. `fault` injects a named defect into the pipeline
// under test ("filterbank" perturbs the mel constant); empty means none.
std::vector<DspCheck> validate_dsp(std::string_view fault = {});

}  // namespace avx

#endif  // AVX_DSP_REFERENCE_HPP_
