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

#ifndef AVX_COMMON_HPP_
#define AVX_COMMON_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>
#include <atomic>
#include <exception>
#include <mutex>

namespace avx {

// Runtime failure inside the pipeline (maps to exit code 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: config, spec, arguments (maps to exit code 1).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Warnings go through a replaceable sink; the default writes to stderr.
using LogSink = std::function<void(std::string_view)>;
void set_warning_sink(LogSink sink);
void log_warning(std::string_view message);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);

// Named-stream seed splitting: the stream id is a hash of the purpose string
// (which callers build from ids, e.g. "candidates/scene2/step7") mixed with the
// parent seed. Streams with different purposes are independent.
std::uint64_t stream_seed(std::uint64_t parent, std::string_view purpose);

std::string hex64(std::uint64_t value);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Portable random source. std::*_distribution output is implementation
// defined, so the few distributions needed are written out here to keep runs
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Integer in [0, n).
  std::size_t index(std::size_t n);
  // Integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1)));
  }
  bool bernoulli(double p) { return uniform() < p; }
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Runs body(i) for i in [0, n) on up to `workers` threads. The first
// exception thrown by any body is rethrown after all threads join.
template <typename Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t count = workers < n ? workers : n;
  for (std::size_t t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::size_t default_workers();

}  // namespace avx

#endif  // AVX_COMMON_HPP_
