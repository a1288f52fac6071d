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

#include <cmath>
#include <numbers>
#include <numeric>

#include "avx/audio_features.hpp"
#include "avx/dsp_reference.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace avx;

namespace {

Waveform random_modal_clip(std::uint64_t seed) {
  Rng rng(seed);
  const Material m = kAllMaterials[rng.index(kMaterialCount)];
  const auto profile = sample_modal_profile(m, rng);
  const auto raw = synthesize_modes(profile, rng.uniform(0.85, 1.1), rng.uniform(0.05, 0.95),
                                    {rng.uniform(0.5, 2.0), 0.01}, rng.next(), rng.next(), 16000);
  return normalize_and_clip(raw);
}

Waveform tone(double f, std::size_t n, double damping = 0.0) {
  Waveform w;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 16000.0;
    w.samples[i] = std::exp(-damping * t) * std::sin(2.0 * std::numbers::pi * f * t);
  }
  return w;
}

}  // namespace

TEST_CASE("impulse clip lands 30 ms into a 300 ms window") {
  Waveform w;
  w.samples.assign(16000, 0.0);
  w.samples[8000] = 0.7;
  const auto c = normalize_and_clip(w);
  REQUIRE(c.samples.size() == 4800);
  for (std::size_t i = 0; i < c.samples.size(); ++i) CHECK(c.samples[i] == (i == 480 ? 1.0 : 0.0));
}

TEST_CASE("onsets near the edges are zero padded") {
  Waveform w;
  w.samples.assign(1000, 0.0);
  w.samples[100] = -2.0;
  const auto c = normalize_and_clip(w);
  REQUIRE(c.samples.size() == 4800);
  CHECK(c.samples[480] == -1.0);
  CHECK(c.samples[479 - 100] == 0.0);
  CHECK(c.peak() == 1.0);
}

TEST_CASE("clipping is idempotent and level invariant") {
  const auto clip = random_modal_clip(3);
  CHECK(clip.peak() == doctest::Approx(1.0).epsilon(1e-15));
  const auto again = normalize_and_clip(clip);
  REQUIRE(again.samples.size() == clip.samples.size());
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    REQUIRE(again.samples[i] == doctest::Approx(clip.samples[i]).epsilon(1e-15));

  Waveform quiet = clip;
  for (auto& s : quiet.samples) s *= 0.25;
  const auto q = normalize_and_clip(quiet);
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    REQUIRE(std::abs(q.samples[i] - clip.samples[i]) <= 1e-15);
}

TEST_CASE("silent input is rejected") {
  Waveform w;
  w.samples.assign(4000, 1e-9);
  CHECK_THROWS_WITH_AS(normalize_and_clip(w), "no impact detected", Error);
}

TEST_CASE("mel scale uses the HTK formula") {
  CHECK(hz_to_mel(0.0) == 0.0);
  CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-14));
  for (double f : {10.0, 440.0, 3999.0, 8000.0}) CHECK(mel_to_hz(hz_to_mel(f)) == doctest::Approx(f));
}

TEST_CASE("framing of a 300 ms clip") {
  const MfccConfig cfg;
  CHECK(frame_length(cfg, 16000) == 400);
  CHECK(hop_length(cfg, 16000) == 160);
  CHECK(frame_count(4800, cfg, 16000) == 28);
  CHECK(frame_count(400, cfg, 16000) == 1);
  CHECK(frame_count(100, cfg, 16000) == 1);
}

TEST_CASE("triangular filters form a partition of unity between the outer centers") {
  const MfccConfig cfg;
  const MelFilterbank bank(cfg, 16000);
  const auto& w = bank.weights();
  const auto& c = bank.centers_hz();
  REQUIRE(w.size() == 26);
  for (std::size_t b = 1; b < c.size(); ++b) CHECK(c[b] > c[b - 1]);
  for (std::size_t k = 0; k < w[0].size(); ++k) {
    const double f = k * 16000.0 / 512.0;
    double sum = 0.0;
    for (const auto& band : w) {
      CHECK(band[k] >= 0.0);
      CHECK(band[k] <= 1.0);
      sum += band[k];
    }
    if (f >= c.front() && f <= c.back()) CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (const auto& band : w) CHECK(std::accumulate(band.begin(), band.end(), 0.0) > 0.0);
}

TEST_CASE("orthonormal DCT preserves energy and maps constants to c0") {
  std::vector<double> x(26);
  Rng rng(4);
  for (auto& v : x) v = rng.normal();
  const auto y = dct_ortho(x, 26);
  double ex = 0.0, ey = 0.0;
  for (double v : x) ex += v * v;
  for (double v : y) ey += v * v;
  CHECK(ey == doctest::Approx(ex).epsilon(1e-12));

  const auto c = dct_ortho(std::vector<double>(26, 2.0), 13);
  CHECK(c[0] == doctest::Approx(2.0 * std::sqrt(26.0)));
  for (std::size_t k = 1; k < c.size(); ++k) CHECK(std::abs(c[k]) < 1e-12);
}

TEST_CASE("MFCC matches the brute-force oracle") {
  for (std::uint64_t seed : {11, 12, 13}) {
    const auto clip = random_modal_clip(seed);
    const auto fast = compute_mfcc(clip);
    const auto slow = oracle::mfcc(clip.samples);
    REQUIRE(fast.frames == slow.size());
    REQUIRE(fast.coefficients == 13);
    double worst = 0.0;
    for (std::size_t t = 0; t < fast.frames; ++t)
      for (std::size_t d = 0; d < 13; ++d) worst = std::max(worst, std::abs(fast.at(t, d) - slow[t][d]));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("MCD closed forms") {
  MfccMatrix a, b;
  a.frames = b.frames = 3;
  a.coefficients = b.coefficients = 13;
  a.values.assign(39, 0.0);
  b.values.assign(39, 0.0);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t d = 1; d < 13; ++d) b.at(t, d) = 1.0;
  CHECK(std::abs(mcd(a, b) - 10.0 / std::log(10.0) * std::sqrt(24.0)) < 1e-9);

  // c0 does not count.
  MfccMatrix c = a;
  for (std::size_t t = 0; t < 3; ++t) c.at(t, 0) = 50.0;
  CHECK(mcd(a, c) == 0.0);

  const auto clip = random_modal_clip(21);
  const auto m = compute_mfcc(clip);
  CHECK(mcd(m, m) == 0.0);

  // Frame-mean over the overlap only.
  MfccMatrix shorter = b;
  shorter.frames = 1;
  shorter.values.resize(13);
  CHECK(mcd(a, shorter) == doctest::Approx(mcd(a, b)));

  MfccMatrix wrong = a;
  wrong.coefficients = 12;
  CHECK_THROWS_AS(mcd(a, wrong), ValidationError);
  MfccMatrix empty;
  empty.coefficients = 13;
  CHECK_THROWS_AS(mcd(a, empty), Error);
}

TEST_CASE("MCD matches the oracle distance on real clips") {
  const auto x = random_modal_clip(31), y = random_modal_clip(32);
  CHECK(mcd(compute_mfcc(x), compute_mfcc(y)) ==
        doctest::Approx(oracle::mcd(oracle::mfcc(x.samples), oracle::mfcc(y.samples))).epsilon(1e-9));
}

TEST_CASE("gain changes move only c0") {
  const auto clip = random_modal_clip(41);
  Waveform loud = clip;
  for (auto& s : loud.samples) s *= 3.0;
  CHECK(mcd(compute_mfcc(clip), compute_mfcc(loud)) < 1e-9);
}

TEST_CASE("silence gives identical floored frames") {
  Waveform w;
  w.samples.assign(4800, 0.0);
  const auto m = compute_mfcc(w);
  for (std::size_t t = 1; t < m.frames; ++t)
    for (std::size_t d = 0; d < m.coefficients; ++d) CHECK(m.at(t, d) == m.at(0, d));
  const auto chroma = compute_chroma(w);
  for (double v : chroma) CHECK(v == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("chroma of an A is concentrated on pitch class A") {
  const auto c = compute_chroma(tone(440.0, 4800));
  CHECK(std::accumulate(c.begin(), c.end(), 0.0) == doctest::Approx(1.0));
  CHECK(std::max_element(c.begin(), c.end()) - c.begin() == 0);
  CHECK(c[0] > 0.5);
  const auto e = compute_chroma(tone(659.26, 4800));  // E5
  CHECK(std::max_element(e.begin(), e.end()) - e.begin() == 7);
}

TEST_CASE("mel statistics of a 1 kHz tone") {
  const MfccConfig cfg;
  const MelFilterbank bank(cfg, 16000);
  // The hop spans exactly ten periods, so every frame sees the same spectrum.
  const auto steady = compute_mel_stats(tone(1000.0, 4800));
  REQUIRE(steady.size() == 52);
  for (std::size_t b = 0; b < 26; ++b) CHECK(steady[26 + b] < 1e-9);

  const auto decaying = compute_mel_stats(tone(1000.0, 4800, 20.0));
  std::size_t near = 0;
  for (std::size_t b = 0; b < 26; ++b)
    if (std::abs(bank.centers_hz()[b] - 1000.0) < std::abs(bank.centers_hz()[near] - 1000.0)) near = b;
  CHECK(decaying[near] > decaying[25]);
  CHECK(decaying[26 + near] > 0.1);
}

TEST_CASE("audio summary has a fixed length") {
  const auto f = extract_audio(random_modal_clip(51));
  CHECK(f.mfcc.frames == 28);
  CHECK(f.mel_stats.size() == 52);
  CHECK(f.summary().size() == 2 * 13 + 12 + 52);
}

TEST_CASE("built-in DSP checks pass and catch an injected fault") {
  const auto checks = validate_dsp();
  REQUIRE(checks.size() == 4);
  for (const auto& c : checks) CHECK_MESSAGE(c.passed, c.name);

  const auto faulty = validate_dsp("filterbank");
  bool caught = false;
  for (const auto& c : faulty)
    if (c.name == "mfcc_vs_bruteforce") caught = !c.passed;
  CHECK(caught);
  CHECK_THROWS_AS(validate_dsp("nonsense"), ValidationError);
}
