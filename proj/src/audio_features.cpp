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

#include "avx/audio_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "avx/fft.hpp"

namespace avx {

std::vector<double> AudioFeature::summary() const {
  std::vector<double> out;
  out.reserve(2 * mfcc.coefficients + kChromaBins + mel_stats.size());
  std::vector<double> mean(mfcc.coefficients, 0.0), sq(mfcc.coefficients, 0.0);
  for (std::size_t t = 0; t < mfcc.frames; ++t)
    for (std::size_t d = 0; d < mfcc.coefficients; ++d) mean[d] += mfcc.at(t, d);
  const double n = static_cast<double>(std::max<std::size_t>(mfcc.frames, 1));
  for (auto& m : mean) m /= n;
  for (std::size_t t = 0; t < mfcc.frames; ++t)
    for (std::size_t d = 0; d < mfcc.coefficients; ++d) {
      const double e = mfcc.at(t, d) - mean[d];
      sq[d] += e * e;
    }
  out.insert(out.end(), mean.begin(), mean.end());
  for (double s : sq) out.push_back(std::sqrt(s / n));
  out.insert(out.end(), chroma.begin(), chroma.end());
  out.insert(out.end(), mel_stats.begin(), mel_stats.end());
  return out;
}

Waveform normalize_and_clip(const Waveform& w, const ClipConfig& cfg) {
  const double peak = w.peak();
  if (!(peak > cfg.silence_floor)) throw Error("no impact detected");
  const double threshold = cfg.onset_fraction * peak;
  std::size_t onset = 0;
  while (onset < w.samples.size() && !(std::abs(w.samples[onset]) > threshold)) ++onset;

  const double rate = w.sample_rate_hz;
  const auto pre = static_cast<long>(std::lround(cfg.pre_onset_s * rate));
  const auto len = static_cast<std::size_t>(std::lround((cfg.pre_onset_s + cfg.post_onset_s) * rate));
  const long start = static_cast<long>(onset) - pre;

  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.assign(len, 0.0);
  for (std::size_t j = 0; j < len; ++j) {
    const long src = start + static_cast<long>(j);
    if (src >= 0 && src < static_cast<long>(w.samples.size()))
      out.samples[j] = w.samples[static_cast<std::size_t>(src)];
  }
  const double clip_peak = out.peak();
  for (auto& s : out.samples) s /= clip_peak;
  return out;
}

double hz_to_mel(double hz, const MfccConfig& cfg) {
  return cfg.mel_scale * std::log10(1.0 + hz / cfg.mel_break_hz);
}

double mel_to_hz(double mel, const MfccConfig& cfg) {
  return cfg.mel_break_hz * (std::pow(10.0, mel / cfg.mel_scale) - 1.0);
}

std::size_t frame_length(const MfccConfig& cfg, int sample_rate_hz) {
  return static_cast<std::size_t>(std::lround(cfg.frame_s * sample_rate_hz));
}

std::size_t hop_length(const MfccConfig& cfg, int sample_rate_hz) {
  return static_cast<std::size_t>(std::lround(cfg.hop_s * sample_rate_hz));
}

std::size_t frame_count(std::size_t samples, const MfccConfig& cfg, int sample_rate_hz) {
  const std::size_t frame = frame_length(cfg, sample_rate_hz);
  const std::size_t hop = hop_length(cfg, sample_rate_hz);
  if (samples <= frame) return 1;
  return 1 + (samples - frame) / hop;
}

MelFilterbank::MelFilterbank(const MfccConfig& cfg, int sample_rate_hz) {
  if (cfg.bands == 0) throw ValidationError("mel filterbank needs at least one band");
  if (!(cfg.f_max_hz > cfg.f_min_hz) || cfg.f_max_hz > sample_rate_hz / 2.0 + 1e-9)
    throw ValidationError("mel filterbank range must satisfy f_min < f_max <= Nyquist");
  const double mel_lo = hz_to_mel(cfg.f_min_hz, cfg);
  const double mel_hi = hz_to_mel(cfg.f_max_hz, cfg);
  std::vector<double> edges(cfg.bands + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(cfg.bands + 1), cfg);

  const std::size_t bins = cfg.fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(sample_rate_hz) / static_cast<double>(cfg.fft_size);
  weights_.assign(cfg.bands, std::vector<double>(bins, 0.0));
  centers_.resize(cfg.bands);
  for (std::size_t b = 0; b < cfg.bands; ++b) {
    const double lo = edges[b], c = edges[b + 1], hi = edges[b + 2];
    centers_[b] = c;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      if (f > lo && f <= c)
        weights_[b][k] = (f - lo) / (c - lo);
      else if (f > c && f < hi)
        weights_[b][k] = (hi - f) / (hi - c);
    }
  }
}

std::vector<double> MelFilterbank::apply(std::span<const double> power) const {
  std::vector<double> out(weights_.size(), 0.0);
  for (std::size_t b = 0; b < weights_.size(); ++b) {
    const auto& wb = weights_[b];
    double acc = 0.0;
    for (std::size_t k = 0; k < wb.size() && k < power.size(); ++k) acc += wb[k] * power[k];
    out[b] = acc;
  }
  return out;
}

std::vector<std::vector<double>> frame_power_spectra(const Waveform& w, const MfccConfig& cfg) {
  const std::size_t frame = frame_length(cfg, w.sample_rate_hz);
  const std::size_t hop = hop_length(cfg, w.sample_rate_hz);
  if (frame == 0 || hop == 0) throw ValidationError("frame and hop must be non-empty");
  if (!is_power_of_two(cfg.fft_size) || cfg.fft_size < frame)
    throw ValidationError("fft_size must be a power of two >= the frame length");

  // Periodic Hann window.
  std::vector<double> window(frame);
  for (std::size_t i = 0; i < frame; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(frame));

  const std::size_t frames = frame_count(w.samples.size(), cfg, w.sample_rate_hz);
  std::vector<std::vector<double>> spectra;
  spectra.reserve(frames);
  std::vector<double> buf(frame);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < frame; ++i) {
      const std::size_t src = t * hop + i;
      buf[i] = (src < w.samples.size() ? w.samples[src] : 0.0) * window[i];
    }
    spectra.push_back(power_spectrum(buf, cfg.fft_size));
  }
  return spectra;
}

namespace {

std::vector<std::vector<double>> log_mel_from_spectra(
    const std::vector<std::vector<double>>& spectra, const MfccConfig& cfg, int rate) {
  const MelFilterbank bank(cfg, rate);
  std::vector<std::vector<double>> out;
  out.reserve(spectra.size());
  for (const auto& p : spectra) {
    auto e = bank.apply(p);
    for (auto& v : e) v = std::log(std::max(v, cfg.log_floor));
    out.push_back(std::move(e));
  }
  return out;
}

MfccMatrix mfcc_from_log_mel(const std::vector<std::vector<double>>& log_mel,
                             const MfccConfig& cfg) {
  if (cfg.coefficients == 0 || cfg.coefficients > cfg.bands)
    throw ValidationError("coefficient count must be in [1, bands]");
  MfccMatrix m;
  m.frames = log_mel.size();
  m.coefficients = cfg.coefficients;
  m.frame_s = cfg.frame_s;
  m.hop_s = cfg.hop_s;
  m.values.reserve(m.frames * m.coefficients);
  for (const auto& row : log_mel) {
    const auto c = dct_ortho(row, cfg.coefficients);
    m.values.insert(m.values.end(), c.begin(), c.end());
  }
  return m;
}

std::array<double, kChromaBins> chroma_from_spectra(
    const std::vector<std::vector<double>>& spectra, const MfccConfig& cfg, int rate) {
  std::array<double, kChromaBins> acc{};
  const double bin_hz = static_cast<double>(rate) / static_cast<double>(cfg.fft_size);
  for (const auto& p : spectra) {
    for (std::size_t k = 1; k < p.size(); ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      if (f < 30.0) continue;
      const long pc = std::lround(12.0 * std::log2(f / 440.0));
      acc[static_cast<std::size_t>(((pc % 12) + 12) % 12)] += p[k];
    }
  }
  double total = 0.0;
  for (auto& a : acc) {
    a /= static_cast<double>(std::max<std::size_t>(spectra.size(), 1));
    total += a;
  }
  if (total > 0.0) {
    for (auto& a : acc) a /= total;
  } else {
    acc.fill(1.0 / kChromaBins);
  }
  return acc;
}

std::vector<double> mel_stats_from_log_mel(const std::vector<std::vector<double>>& log_mel,
                                           std::size_t bands) {
  std::vector<double> out(2 * bands, 0.0);
  const double n = static_cast<double>(std::max<std::size_t>(log_mel.size(), 1));
  for (const auto& row : log_mel)
    for (std::size_t b = 0; b < bands; ++b) out[b] += row[b];
  for (std::size_t b = 0; b < bands; ++b) out[b] /= n;
  for (const auto& row : log_mel)
    for (std::size_t b = 0; b < bands; ++b) {
      const double e = row[b] - out[b];
      out[bands + b] += e * e;
    }
  for (std::size_t b = 0; b < bands; ++b) out[bands + b] = std::sqrt(out[bands + b] / n);
  return out;
}

}  // namespace

std::vector<std::vector<double>> log_mel_frames(const Waveform& w, const MfccConfig& cfg) {
  return log_mel_from_spectra(frame_power_spectra(w, cfg), cfg, w.sample_rate_hz);
}

std::vector<double> dct_ortho(std::span<const double> x, std::size_t keep) {
  const std::size_t n = x.size();
  keep = std::min(keep, n);
  // Basis rows cached per thread for the last (n, keep).
  thread_local std::size_t cached_n = 0, cached_keep = 0;
  thread_local std::vector<double> basis;
  if (cached_n != n || cached_keep != keep) {
    basis.resize(keep * n);
    const double s0 = std::sqrt(1.0 / static_cast<double>(n));
    const double sk = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < keep; ++k)
      for (std::size_t i = 0; i < n; ++i)
        basis[k * n + i] = (k == 0 ? s0 : sk) *
                           std::cos(std::numbers::pi * static_cast<double>(k) *
                                    (2.0 * static_cast<double>(i) + 1.0) /
                                    (2.0 * static_cast<double>(n)));
    cached_n = n;
    cached_keep = keep;
  }
  std::vector<double> out(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += basis[k * n + i] * x[i];
    out[k] = acc;
  }
  return out;
}

MfccMatrix compute_mfcc(const Waveform& w, const MfccConfig& cfg) {
  return mfcc_from_log_mel(log_mel_frames(w, cfg), cfg);
}

double mcd(const MfccMatrix& a, const MfccMatrix& b) {
  const std::size_t frames = std::min(a.frames, b.frames);
  if (frames == 0) throw Error("mcd: no overlapping frames");
  if (a.coefficients != b.coefficients)
    throw ValidationError("mcd: coefficient counts differ");
  const double k = 10.0 / std::numbers::ln10;
  double total = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    double s = 0.0;
    for (std::size_t d = 1; d < a.coefficients; ++d) {
      const double e = a.at(t, d) - b.at(t, d);
      s += e * e;
    }
    total += k * std::sqrt(2.0 * s);
  }
  return total / static_cast<double>(frames);
}

std::array<double, kChromaBins> compute_chroma(const Waveform& w, const MfccConfig& cfg) {
  return chroma_from_spectra(frame_power_spectra(w, cfg), cfg, w.sample_rate_hz);
}

std::vector<double> compute_mel_stats(const Waveform& w, const MfccConfig& cfg) {
  return mel_stats_from_log_mel(log_mel_frames(w, cfg), cfg.bands);
}

AudioFeature extract_audio(const Waveform& clip, const MfccConfig& cfg) {
  const auto spectra = frame_power_spectra(clip, cfg);
  const auto log_mel = log_mel_from_spectra(spectra, cfg, clip.sample_rate_hz);
  AudioFeature f;
  f.mfcc = mfcc_from_log_mel(log_mel, cfg);
  f.chroma = chroma_from_spectra(spectra, cfg, clip.sample_rate_hz);
  f.mel_stats = mel_stats_from_log_mel(log_mel, cfg.bands);
  return f;
}

}  // namespace avx
