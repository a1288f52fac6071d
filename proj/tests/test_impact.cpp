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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "avx/impact.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace avx;

namespace {

ModalProfile single_mode(double f, double d = 10.0, double g = 1.0) {
  return ModalProfile{{{f, d, g}}};
}

World one_part_world(const ModalProfile& p) {
  ScenarioSpec spec;
  spec.seed = 8;
  spec.catalogue.push_back({"bell", {{"shell", Material::metal, p}}, 1.0});
  spec.scenes.push_back({"s", {"bell"}, 0});
  return generate_world(spec);
}

}  // namespace

TEST_CASE("single 440 Hz mode peaks at 440 Hz within one DFT bin") {
  const auto w = synthesize_modes(single_mode(440.0), 1.0, 0.5, {}, 1, 2, 16000);
  // Skip the preroll and click so the modal tone dominates.
  std::vector<double> tail(w.samples.begin() + 1000, w.samples.begin() + 1000 + 4000);
  const double peak = oracle::dft_peak_hz(tail, 16000);
  CHECK(std::abs(peak - 440.0) <= 16000.0 / 4000.0);
}

TEST_CASE("size scale multiplies modal frequencies") {
  const auto w = synthesize_modes(single_mode(1000.0, 5.0), 1.5, 0.5, {}, 1, 2, 16000);
  std::vector<double> tail(w.samples.begin() + 1000, w.samples.begin() + 5000);
  CHECK(std::abs(oracle::dft_peak_hz(tail, 16000) - 1500.0) <= 4.0);
}

TEST_CASE("energy scales the waveform exactly when noiseless") {
  const ModalProfile p{{{700.0, 30.0, 1.0}, {1900.0, 50.0, 0.5}}};
  const auto a = synthesize_modes(p, 1.0, 0.3, {1.0, 0.0}, 4, 5, 16000);
  const auto b = synthesize_modes(p, 1.0, 0.3, {2.0, 0.0}, 4, 5, 16000);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) REQUIRE(b.samples[i] == 2.0 * a.samples[i]);
}

TEST_CASE("u = 0 silences every mode, leaving the click") {
  const SynthesisOptions opts;
  const auto w = synthesize_modes(single_mode(440.0), 1.0, 0.0, {}, 4, 5, 16000, opts);
  const auto onset = static_cast<std::size_t>(std::lround(opts.preroll_s * 16000));
  const auto click = static_cast<std::size_t>(std::lround(opts.click_s * 16000));
  double click_energy = 0.0;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (i >= onset && i < onset + click)
      click_energy += std::abs(w.samples[i]);
    else
      REQUIRE(w.samples[i] == 0.0);
  }
  CHECK(click_energy > 0.0);
}

TEST_CASE("spatial gain follows |sin(pi m u)|") {
  // At u = 0.5 mode 2 sits on a node; at u = 0.25 both modes sound.
  const ModalProfile both{{{500.0, 1.0, 1.0}, {3000.0, 1.0, 1.0}}};
  const ModalProfile first{{{500.0, 1.0, 1.0}}};
  SynthesisOptions opts;
  opts.click_gain = 0.0;
  const auto a = synthesize_modes(both, 1.0, 0.5, {}, 1, 2, 16000, opts);
  const auto b = synthesize_modes(first, 1.0, 0.5, {}, 1, 2, 16000, opts);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    diff = std::max(diff, std::abs(a.samples[i] - b.samples[i]));
  CHECK(diff < 1e-12);
  std::vector<double> tail(a.samples.begin() + 800, a.samples.begin() + 4800);
  CHECK(std::abs(oracle::dft_peak_hz(tail, 16000) - 500.0) <= 4.0);

  const auto c = synthesize_modes(both, 1.0, 0.25, {}, 1, 2, 16000, opts);
  const auto d = synthesize_modes(first, 1.0, 0.25, {}, 1, 2, 16000, opts);
  diff = 0.0;
  for (std::size_t i = 0; i < c.samples.size(); ++i)
    diff = std::max(diff, std::abs(c.samples[i] - d.samples[i]));
  CHECK(diff > 0.5);
}

TEST_CASE("the recurrence tracks the closed-form damped sine") {
  SynthesisOptions opts;
  opts.click_gain = 0.0;
  const double f = 2345.0, d = 37.0, u = 0.3;
  const auto w = synthesize_modes(single_mode(f, d), 1.0, u, {}, 1, 2, 16000, opts);
  const auto onset = static_cast<std::size_t>(std::lround(opts.preroll_s * 16000));
  const double g = std::abs(std::sin(std::numbers::pi * u));
  double worst = 0.0;
  for (std::size_t i = onset; i < w.samples.size(); ++i) {
    const double t = static_cast<double>(i - onset) / 16000.0;
    const double ref = g * std::exp(-d * t) * std::sin(2.0 * std::numbers::pi * f * t);
    worst = std::max(worst, std::abs(w.samples[i] - ref));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("synthesis is deterministic and noise depends on the seed") {
  const World world = one_part_world(single_mode(900.0, 20.0));
  const InteractionPoint p{"s", "bell", "shell", 0.4};
  const auto a = synthesize_impact(p, world, {1.0, 0.05}, 11);
  const auto b = synthesize_impact(p, world, {1.0, 0.05}, 11);
  const auto c = synthesize_impact(p, world, {1.0, 0.05}, 12);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  // Without noise the seed does not matter: same part and u, same sound.
  CHECK(synthesize_impact(p, world, {}, 11).samples == synthesize_impact(p, world, {}, 99).samples);
}

TEST_CASE("modes above Nyquist are reported by index") {
  const ModalProfile p{{{1000.0, 10.0, 1.0}, {7000.0, 10.0, 1.0}}};
  CHECK_NOTHROW(synthesize_modes(p, 1.0, 0.5, {}, 1, 2, 16000));
  try {
    synthesize_modes(p, 1.2, 0.5, {}, 1, 2, 16000);
    FAIL("expected a synthesis error");
  } catch (const SynthesisError& e) {
    CHECK(std::string(e.what()).find("mode 2") != std::string::npos);
  }
  const World world = one_part_world(single_mode(9000.0));
  try {
    synthesize_impact({"s", "bell", "shell", 0.5}, world, {}, 1);
    FAIL("expected a synthesis error");
  } catch (const SynthesisError& e) {
    CHECK(std::string(e.what()).find("bell/shell") != std::string::npos);
  }
  CHECK_THROWS_AS(synthesize_modes(single_mode(440.0), 1.0, 0.5, {0.0, 0.0}, 1, 2, 16000),
                  ValidationError);
}

TEST_CASE("superimpose sums, pads and renormalizes") {
  Waveform a{{0.5, -0.5}, 16000}, b{{0.25, 0.25, 1.0}, 16000};
  const auto s = superimpose(a, b);
  REQUIRE(s.samples.size() == 3);
  CHECK(s.samples[0] == doctest::Approx(0.75));
  CHECK(s.samples[1] == doctest::Approx(-0.25));
  CHECK(s.samples[2] == doctest::Approx(1.0));
  CHECK(s.peak() == doctest::Approx(1.0));
  CHECK_THROWS_AS(superimpose(a, Waveform{{1.0}, 8000}), ValidationError);
}

TEST_CASE("write_wav emits a 16-bit mono PCM file") {
  const auto path = std::filesystem::temp_directory_path() / "avx_impact_test.wav";
  Waveform w{{0.0, 0.5, -1.0, 1.0}, 16000};
  write_wav(w, path);
  std::ifstream in(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
  REQUIRE(bytes.size() == 44 + 8);
  CHECK(std::string(bytes.data(), 4) == "RIFF");
  CHECK(std::string(bytes.data() + 8, 4) == "WAVE");
  std::uint16_t channels, bits;
  std::uint32_t rate;
  std::memcpy(&channels, bytes.data() + 22, 2);
  std::memcpy(&rate, bytes.data() + 24, 4);
  std::memcpy(&bits, bytes.data() + 34, 2);
  CHECK(channels == 1);
  CHECK(rate == 16000);
  CHECK(bits == 16);
  std::int16_t s[4];
  std::memcpy(s, bytes.data() + 44, 8);
  CHECK(s[0] == 0);
  CHECK(s[2] == -32767);
  CHECK(s[3] == 32767);
  std::filesystem::remove(path);
}
