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

#include "avx/dsp_reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace avx {

MfccMatrix reference_mfcc(const Waveform& w, const MfccConfig& cfg) {
  const double pi = std::numbers::pi;
  const double rate = w.sample_rate_hz;
  const int frame = static_cast<int>(std::lround(cfg.frame_s * rate));
  const int hop = static_cast<int>(std::lround(cfg.hop_s * rate));
  const int nfft = static_cast<int>(cfg.fft_size);
  const int bands = static_cast<int>(cfg.bands);
  const int len = static_cast<int>(w.samples.size());
  const int frames = len <= frame ? 1 : 1 + (len - frame) / hop;

  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto inv_mel = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };

  MfccMatrix out;
  out.frames = static_cast<std::size_t>(frames);
  out.coefficients = cfg.coefficients;
  out.frame_s = cfg.frame_s;
  out.hop_s = cfg.hop_s;
  out.values.assign(out.frames * out.coefficients, 0.0);

  std::vector<double> power(static_cast<std::size_t>(nfft / 2 + 1));
  std::vector<double> logmel(static_cast<std::size_t>(bands));
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k <= nfft / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (int n = 0; n < frame; ++n) {
        const int src = t * hop + n;
        const double x = src < len ? w.samples[static_cast<std::size_t>(src)] : 0.0;
        const double hann = 0.5 * (1.0 - std::cos(2.0 * pi * n / frame));
        re += x * hann * std::cos(2.0 * pi * k * n / nfft);
        im -= x * hann * std::sin(2.0 * pi * k * n / nfft);
      }
      power[static_cast<std::size_t>(k)] = re * re + im * im;
    }
    const double m0 = mel(cfg.f_min_hz), m1 = mel(cfg.f_max_hz);
    for (int b = 0; b < bands; ++b) {
      const double lo = inv_mel(m0 + (m1 - m0) * b / (bands + 1));
      const double c = inv_mel(m0 + (m1 - m0) * (b + 1) / (bands + 1));
      const double hi = inv_mel(m0 + (m1 - m0) * (b + 2) / (bands + 1));
      double e = 0.0;
      for (int k = 0; k <= nfft / 2; ++k) {
        const double f = k * rate / nfft;
        double wgt = 0.0;
        if (f > lo && f <= c) wgt = (f - lo) / (c - lo);
        if (f > c && f < hi) wgt = (hi - f) / (hi - c);
        e += wgt * power[static_cast<std::size_t>(k)];
      }
      logmel[static_cast<std::size_t>(b)] = std::log(e < 1e-10 ? 1e-10 : e);
    }
    for (std::size_t d = 0; d < cfg.coefficients; ++d) {
      double acc = 0.0;
      for (int n = 0; n < bands; ++n)
        acc += logmel[static_cast<std::size_t>(n)] *
               std::cos(pi * static_cast<double>(d) * (n + 0.5) / bands);
      out.at(static_cast<std::size_t>(t), d) =
          acc * std::sqrt((d == 0 ? 1.0 : 2.0) / bands);
    }
  }
  return out;
}

namespace {

Waveform random_clip(std::uint64_t seed) {
  Rng rng(seed);
  ModalProfile profile;
  const int modes = rng.integer(1, 6);
  for (int m = 0; m < modes; ++m)
    profile.modes.push_back({rng.uniform(100.0, 7000.0), rng.uniform(5.0, 300.0),
                             rng.uniform(0.2, 1.0)});
  std::sort(profile.modes.begin(), profile.modes.end(),
            [](const Mode& a, const Mode& b) { return a.frequency_hz < b.frequency_hz; });
  const auto raw = synthesize_modes(profile, 1.0, rng.uniform(0.1, 0.9), {1.0, 0.01},
                                    rng.next(), rng.next(), 16000);
  return normalize_and_clip(raw);
}

}  // namespace

std::vector<DspCheck> validate_dsp(std::string_view fault) {
  MfccConfig pipeline;
  if (fault == "filterbank") {
    pipeline.mel_break_hz = 700.0 * 1.01;
  } else if (!fault.empty()) {
    throw ValidationError("unknown fault '" + std::string(fault) + "'");
  }
  std::vector<DspCheck> checks;

  {
    DspCheck c{"mfcc_vs_bruteforce", false, 0.0, 1e-6, ""};
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto clip = random_clip(stream_seed(0xd5b, "clip/" + std::to_string(i)));
      const auto fast = compute_mfcc(clip, pipeline);
      const auto slow = reference_mfcc(clip);
      if (fast.values.size() != slow.values.size()) {
        c.error = INFINITY;
        break;
      }
      for (std::size_t k = 0; k < fast.values.size(); ++k)
        c.error = std::max(c.error, std::abs(fast.values[k] - slow.values[k]));
    }
    c.passed = c.error <= c.tolerance;
    c.detail = "20 random clips, max abs coefficient difference";
    checks.push_back(c);
  }
  {
    MfccMatrix a, b;
    a.frames = b.frames = 2;
    a.coefficients = b.coefficients = 13;
    a.values.assign(26, 0.0);
    b.values.assign(26, 0.0);
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t d = 1; d < 13; ++d) b.at(t, d) = 1.0;
    const double expected = 10.0 / std::log(10.0) * std::sqrt(24.0);
    DspCheck c{"mcd_closed_form", false, std::abs(mcd(a, b) - expected), 1e-9,
               "unit differences on c1..c12"};
    c.passed = c.error <= c.tolerance;
    checks.push_back(c);
  }
  {
    const auto clip = random_clip(99);
    const auto m = compute_mfcc(clip, pipeline);
    DspCheck c{"mcd_identity", false, mcd(m, m), 0.0, "mcd(x, x) == 0"};
    c.passed = c.error == 0.0;
    checks.push_back(c);
  }
  {
    DspCheck c{"amplitude_invariance", false, 0.0, 1e-9, "scales 0.25, 0.5, 2"};
    for (std::uint64_t i = 0; i < 5; ++i) {
      auto clip = random_clip(stream_seed(0xa3, std::to_string(i)));
      const auto base = compute_mfcc(normalize_and_clip(clip), pipeline);
      for (double s : {0.25, 0.5, 2.0}) {
        Waveform scaled = clip;
        for (auto& x : scaled.samples) x *= s;
        c.error = std::max(c.error, mcd(base, compute_mfcc(normalize_and_clip(scaled), pipeline)));
      }
    }
    c.passed = c.error < c.tolerance;
    checks.push_back(c);
  }
  return checks;
}

}  // namespace avx
