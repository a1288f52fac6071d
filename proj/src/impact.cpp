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

#include "avx/impact.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>

namespace avx {

double Waveform::peak() const {
  double p = 0.0;
  for (double s : samples) p = std::max(p, std::abs(s));
  return p;
}

Waveform synthesize_modes(const ModalProfile& profile, double size_scale, double u,
                          const StrikeParams& strike, std::uint64_t click_seed,
                          std::uint64_t noise_seed, int sample_rate_hz,
                          const SynthesisOptions& opts) {
  if (!(strike.energy > 0.0)) throw ValidationError("strike energy must be > 0");
  if (!(strike.noise_level >= 0.0)) throw ValidationError("noise_level must be >= 0");
  if (sample_rate_hz <= 0) throw ValidationError("sample rate must be positive");
  const double nyquist = sample_rate_hz / 2.0;
  for (std::size_t m = 0; m < profile.modes.size(); ++m) {
    const double f = profile.modes[m].frequency_hz * size_scale;
    if (f >= nyquist)
      throw SynthesisError("mode " + std::to_string(m + 1) + " at " + std::to_string(f) +
                           " Hz is at or above Nyquist (" + std::to_string(nyquist) + " Hz)");
  }

  const double rate = sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::lround(opts.duration_s * rate));
  const auto onset = static_cast<std::size_t>(std::lround(opts.preroll_s * rate));
  const auto click_len = static_cast<std::size_t>(std::lround(opts.click_s * rate));
  constexpr double pi = std::numbers::pi;

  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples.assign(n, 0.0);

  for (std::size_t m = 0; m < profile.modes.size(); ++m) {
    const auto& mode = profile.modes[m];
    const double gain = mode.gain * std::abs(std::sin(pi * static_cast<double>(m + 1) * u));
    if (gain == 0.0) continue;
    const double omega = 2.0 * pi * mode.frequency_hz * size_scale;
    // e^{(-d + i*omega) t} advanced by one sample per step; the imaginary
    // part is the damped sine. Re-anchored every 256 samples.
    const std::complex<double> rot = std::exp(std::complex<double>(-mode.damping_per_s, omega) / rate);
    std::complex<double> z = 1.0;
    for (std::size_t i = onset; i < n; ++i) {
      const std::size_t k = i - onset;
      if (k % 256 == 0) {
        const double t = static_cast<double>(k) / rate;
        z = std::exp(-mode.damping_per_s * t) * std::complex<double>(std::cos(omega * t), std::sin(omega * t));
      }
      w.samples[i] += gain * z.imag();
      z *= rot;
    }
  }

  Rng click(click_seed);
  for (std::size_t k = 0; k < click_len && onset + k < n; ++k) {
    const double env = 1.0 - static_cast<double>(k) / static_cast<double>(click_len);
    w.samples[onset + k] += opts.click_gain * env * (2.0 * click.uniform() - 1.0);
  }

  for (auto& s : w.samples) s *= strike.energy;

  if (strike.noise_level > 0.0) {
    Rng noise(noise_seed);
    for (auto& s : w.samples) s += strike.noise_level * noise.normal();
  }
  return w;
}

Waveform synthesize_impact(const InteractionPoint& point, const World& world,
                           const StrikeParams& strike, std::uint64_t seed,
                           const SynthesisOptions& opts) {
  const auto r = world.resolve(point);
  const std::uint64_t click_seed =
      stream_seed(world.spec.seed, "click/" + point.object_id + "/" + point.part_id);
  try {
    return synthesize_modes(r.part->modal_profile, r.object->size_scale, point.u, strike,
                            click_seed, stream_seed(seed, "noise"), world.sample_rate_hz,
                            opts);
  } catch (const SynthesisError& e) {
    throw SynthesisError("part '" + point.object_id + "/" + point.part_id + "': " + e.what());
  }
}

Waveform superimpose(const Waveform& a, const Waveform& b) {
  if (a.sample_rate_hz != b.sample_rate_hz)
    throw ValidationError("superimpose: sample rates differ (" +
                          std::to_string(a.sample_rate_hz) + " vs " +
                          std::to_string(b.sample_rate_hz) + ")");
  Waveform out;
  out.sample_rate_hz = a.sample_rate_hz;
  out.samples.assign(std::max(a.samples.size(), b.samples.size()), 0.0);
  for (std::size_t i = 0; i < a.samples.size(); ++i) out.samples[i] += a.samples[i];
  for (std::size_t i = 0; i < b.samples.size(); ++i) out.samples[i] += b.samples[i];
  const double p = out.peak();
  if (p > 0.0)
    for (auto& s : out.samples) s /= p;
  return out;
}

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16(std::ofstream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

void write_wav(const Waveform& w, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.write("data", 4);
  put_u32(out, data_bytes);
  for (double s : w.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32767.0))));
  }
  if (!out) throw Error("short write to " + path.string());
}

}  // namespace avx
