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

#include "avx/av_store.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace avx {

ComponentDistances component_distances(const VisualFeature& a, const VisualFeature& b) {
  ComponentDistances d{};
  for (std::size_t k = 0; k < kVisualComponents; ++k) {
    const auto& x = a.components[k];
    const auto& y = b.components[k];
    if (x.size() != y.size())
      throw ValidationError("visual component " +
                            std::string(to_string(static_cast<VisualComponent>(k))) +
                            ": dimension mismatch (" + std::to_string(x.size()) + " vs " +
                            std::to_string(y.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = x[i] - y[i];
      s += e * e;
    }
    d[k] = std::sqrt(s);
  }
  return d;
}

double visual_distance(const VisualFeature& a, const VisualFeature& b, const WeightVector& w) {
  const auto d = component_distances(a, b);
  double total = 0.0;
  for (std::size_t k = 0; k < kVisualComponents; ++k) total += w.w[k] * d[k];
  return total;
}

WeightVector fit_weights(std::span<const ComponentDistances> distances,
                         std::span<const double> mcd_values) {
  constexpr std::size_t p = kVisualComponents + 1;
  if (distances.size() != mcd_values.size())
    throw ValidationError("fit_weights: distance and MCD counts differ");
  if (distances.size() < p)
    throw ValidationError("fit_weights: need at least 6 pairs, got " +
                          std::to_string(distances.size()));
  const auto n = static_cast<Eigen::Index>(distances.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(p));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < kVisualComponents; ++k)
      x(i, static_cast<Eigen::Index>(k)) = distances[static_cast<std::size_t>(i)][k];
    x(i, static_cast<Eigen::Index>(kVisualComponents)) = 1.0;
    y(i) = mcd_values[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(p))
    throw ValidationError("fit_weights: rank-deficient design matrix (rank " +
                          std::to_string(qr.rank()) +
                          " of 6); supply more pairs with more varied component distances");
  const Eigen::VectorXd beta = qr.solve(y);

  WeightVector out;
  for (std::size_t k = 0; k < kVisualComponents; ++k) {
    double wk = beta(static_cast<Eigen::Index>(k));
    if (wk < 0.0) {
      if (wk < -1e-9)
        log_warning("fit_weights: negative weight " + std::to_string(wk) + " for " +
                    std::string(to_string(static_cast<VisualComponent>(k))) +
                    " clamped to 0");
      wk = 0.0;
    }
    out.w[k] = wk;
  }
  out.intercept = beta(static_cast<Eigen::Index>(kVisualComponents));

  double mean = y.mean(), ss_tot = 0.0, ss_res = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double pred = out.intercept;
    for (std::size_t k = 0; k < kVisualComponents; ++k)
      pred += out.w[k] * x(i, static_cast<Eigen::Index>(k));
    ss_res += (y(i) - pred) * (y(i) - pred);
    ss_tot += (y(i) - mean) * (y(i) - mean);
  }
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

WeightVector fit_weights(std::span<const WeightPair> pairs) {
  std::vector<ComponentDistances> d;
  std::vector<double> m;
  d.reserve(pairs.size());
  m.reserve(pairs.size());
  for (const auto& p : pairs) {
    d.push_back(component_distances(p.a, p.b));
    m.push_back(p.mcd);
  }
  return fit_weights(d, m);
}

namespace {

std::vector<Neighbor> k_smallest(std::vector<Neighbor> all, std::size_t k) {
  k = std::min(k, all.size());
  auto less = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), less);
  all.resize(k);
  return all;
}

}  // namespace

std::vector<Neighbor> StoreView::nearest_by_vision(const VisualFeature& query,
                                                   const WeightVector& w, std::size_t k) const {
  if (records_.empty()) throw Error("nearest_by_vision: store is empty");
  std::vector<Neighbor> all(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i)
    all[i] = {i, visual_distance(query, records_[i].visual, w)};
  return k_smallest(std::move(all), k);
}

std::vector<Neighbor> StoreView::nearest_by_audio(const MfccMatrix& query, std::size_t k) const {
  if (records_.empty()) throw Error("nearest_by_audio: store is empty");
  std::vector<Neighbor> all(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i)
    all[i] = {i, mcd(query, records_[i].audio.mfcc)};
  return k_smallest(std::move(all), k);
}

const AVRecord& StoreView::predict_audio(const VisualFeature& query, const WeightVector& w) const {
  if (records_.empty()) throw Error("predict_audio: store is empty");
  std::size_t best = 0;
  double best_d = visual_distance(query, records_[0].visual, w);
  for (std::size_t i = 1; i < records_.size(); ++i) {
    const double d = visual_distance(query, records_[i].visual, w);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return records_[best];
}

std::size_t AVStore::insert(AVRecord record) {
  std::ostringstream key;
  key << record.point.scene_id << '\x1f' << record.point.object_id << '\x1f'
      << record.point.part_id << '\x1f' << std::hexfloat << record.point.u;
  if (!point_keys_.insert(key.str()).second)
    log_warning("AVStore: duplicate interaction point " + record.point.object_id + "/" +
                record.point.part_id + " inserted again");
  records_.push_back(std::move(record));
  return records_.size();
}

StoreView AVStore::view(std::size_t prefix) const {
  return StoreView(std::span<const AVRecord>(records_).first(std::min(prefix, records_.size())));
}

// ---------------------------------------------------------------------------
// Serialization. Little-endian throughout.

namespace {

static_assert(std::endian::native == std::endian::little,
              "store serialization assumes a little-endian host");

constexpr char kMagic[8] = {'A', 'V', 'X', 'S', 'T', 'O', 'R', 'E'};

class Writer {
 public:
  template <typename T>
  void pod(const T& v) {
    buf_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  void doubles(const std::vector<double>& v) {
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  }
  const std::string& bytes() const { return buf_; }
  void raw(const char* p, std::size_t n) { buf_.append(p, n); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<double> doubles(std::size_t n) {
    need(n * sizeof(double));
    std::vector<double> v(n);
    std::memcpy(v.data(), data_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error("store file truncated");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void AVStore::save(const std::filesystem::path& path, const StoreMetadata& meta) const {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.pod(kStoreFormatVersion);
  w.pod(meta.config_hash);
  w.pod(meta.seed);
  w.pod(static_cast<std::uint32_t>(meta.sample_rate_hz));
  for (double x : meta.weights.w) w.pod(x);
  w.pod(meta.weights.intercept);
  w.pod(meta.weights.r_squared);
  w.pod(static_cast<std::uint64_t>(records_.size()));
  for (const auto& r : records_) {
    w.str(r.point.scene_id);
    w.str(r.point.object_id);
    w.str(r.point.part_id);
    w.pod(r.point.u);
    w.pod(static_cast<std::uint8_t>(r.material));
    for (const auto& c : r.visual.components) {
      w.pod(static_cast<std::uint32_t>(c.size()));
      w.doubles(c);
    }
    const auto& samples = r.waveform ? r.waveform->samples : std::vector<double>{};
    w.pod(static_cast<std::uint64_t>(samples.size()));
    w.doubles(samples);
  }
  write_file_atomic(path, w.bytes());
}

AVStore AVStore::load(const std::filesystem::path& path, StoreMetadata* meta,
                      const MfccConfig& mfcc) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open store file " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof(kMagic) || std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0)
    throw Error(path.string() + " is not a store file");
  Reader r(data.substr(sizeof(kMagic)));
  const auto version = r.pod<std::uint32_t>();
  if (version != kStoreFormatVersion)
    throw Error("unsupported store format version " + std::to_string(version));
  StoreMetadata m;
  m.config_hash = r.pod<std::uint64_t>();
  m.seed = r.pod<std::uint64_t>();
  m.sample_rate_hz = static_cast<int>(r.pod<std::uint32_t>());
  for (auto& x : m.weights.w) x = r.pod<double>();
  m.weights.intercept = r.pod<double>();
  m.weights.r_squared = r.pod<double>();
  const auto count = r.pod<std::uint64_t>();

  AVStore store;
  for (std::uint64_t i = 0; i < count; ++i) {
    AVRecord rec;
    rec.point.scene_id = r.str();
    rec.point.object_id = r.str();
    rec.point.part_id = r.str();
    rec.point.u = r.pod<double>();
    const auto mat = r.pod<std::uint8_t>();
    if (mat >= kMaterialCount) throw Error("store file: bad material code");
    rec.material = kAllMaterials[mat];
    for (auto& c : rec.visual.components) c = r.doubles(r.pod<std::uint32_t>());
    Waveform wave;
    wave.sample_rate_hz = m.sample_rate_hz;
    wave.samples = r.doubles(static_cast<std::size_t>(r.pod<std::uint64_t>()));
    rec.audio = extract_audio(wave, mfcc);
    rec.waveform = std::make_shared<const Waveform>(std::move(wave));
    store.records_.push_back(std::move(rec));
  }
  if (!r.done()) throw Error("store file has trailing bytes");
  if (meta) *meta = m;
  return store;
}

}  // namespace avx
