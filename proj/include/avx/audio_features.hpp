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

#ifndef AVX_AUDIO_FEATURES_HPP_
#define AVX_AUDIO_FEATURES_HPP_

#include <array>
#include <span>
#include <vector>

#include "avx/impact.hpp"

namespace avx {

struct ClipConfig {
  double pre_onset_s = 0.030;
  double post_onset_s = 0.270;
  double onset_fraction = 0.1;  // onset = first sample above this * peak
  double silence_floor = 1e-6;
};

// Reference DSP configuration: 13 coefficients including c0, 26 HTK-mel
// bands over 0..8 kHz, 25 ms Hann frames every 10 ms, no pre-emphasis.
struct MfccConfig {
  std::size_t coefficients = 13;
  std::size_t bands = 26;
  double frame_s = 0.025;
  double hop_s = 0.010;
  double f_min_hz = 0.0;
  double f_max_hz = 8000.0;
  double log_floor = 1e-10;
  double mel_scale = 2595.0;
  double mel_break_hz = 700.0;
  std::size_t fft_size = 512;
};

struct MfccMatrix {
  std::size_t frames = 0;
  std::size_t coefficients = 0;
  std::vector<double> values;  // row-major, frames x coefficients
  double frame_s = 0.025;
  double hop_s = 0.010;

  double at(std::size_t t, std::size_t d) const { return values[t * coefficients + d]; }
  double& at(std::size_t t, std::size_t d) { return values[t * coefficients + d]; }
  std::span<const double> row(std::size_t t) const {
    return {values.data() + t * coefficients, coefficients};
  }
};

inline constexpr std::size_t kChromaBins = 12;

struct AudioFeature {
  MfccMatrix mfcc;
  std::array<double, kChromaBins> chroma{};
  std::vector<double> mel_stats;  // band means, then band standard deviations

  // Fixed-length summary: MFCC frame mean and std, chroma, mel_stats.
  std::vector<double> summary() const;
};

// Locates the onset, cuts [onset - 30 ms, onset + 270 ms] (zero-padded past
// either end) and scales the clip to unit peak. Throws Error("no impact
// detected") on silent input.
Waveform normalize_and_clip(const Waveform& w, const ClipConfig& cfg = {});

double hz_to_mel(double hz, const MfccConfig& cfg = {});
double mel_to_hz(double mel, const MfccConfig& cfg = {});

std::size_t frame_length(const MfccConfig& cfg, int sample_rate_hz);
std::size_t hop_length(const MfccConfig& cfg, int sample_rate_hz);
// 1 + floor((len - frame) / hop), and at least 1 (short clips are zero-padded).
std::size_t frame_count(std::size_t samples, const MfccConfig& cfg, int sample_rate_hz);

// Triangular filters on the continuous bin frequency, edges equally spaced in
// mel between f_min and f_max. weights[b][k] for FFT bin k.
class MelFilterbank {
 public:
  MelFilterbank(const MfccConfig& cfg, int sample_rate_hz);
  std::vector<double> apply(std::span<const double> power) const;
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<double>& centers_hz() const { return centers_; }

 private:
  std::vector<std::vector<double>> weights_;
  std::vector<double> centers_;
};

// Power spectra of every Hann-windowed frame.
std::vector<std::vector<double>> frame_power_spectra(const Waveform& w, const MfccConfig& cfg);

// Natural log of mel band energies, floored, one row per frame.
std::vector<std::vector<double>> log_mel_frames(const Waveform& w, const MfccConfig& cfg = {});

// Orthonormal DCT-II, first `keep` coefficients.
std::vector<double> dct_ortho(std::span<const double> x, std::size_t keep);

MfccMatrix compute_mfcc(const Waveform& w, const MfccConfig& cfg = {});

// Frame-averaged mel-cepstral distortion over the overlapping frames,
// coefficients 1..D-1 (c0 excluded):
//   (10 / ln 10) * sqrt(2 * sum_d (a_d - b_d)^2)
double mcd(const MfccMatrix& a, const MfccMatrix& b);

std::array<double, kChromaBins> compute_chroma(const Waveform& w, const MfccConfig& cfg = {});
std::vector<double> compute_mel_stats(const Waveform& w, const MfccConfig& cfg = {});

// All audio descriptors from one pass over the frames.
AudioFeature extract_audio(const Waveform& clip, const MfccConfig& cfg = {});

}  // namespace avx

#endif  // AVX_AUDIO_FEATURES_HPP_
