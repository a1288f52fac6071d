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

#ifndef AVX_FFT_HPP_
#define AVX_FFT_HPP_

#include <complex>
#include <span>
#include <vector>

namespace avx {

// In-place iterative radix-2 FFT. data.size() must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

// |X[k]|^2 for k = 0..n/2 of a real frame zero-padded to n (a power of two).
std::vector<double> power_spectrum(std::span<const double> frame, std::size_t n);

bool is_power_of_two(std::size_t n);

}  // namespace avx

#endif  // AVX_FFT_HPP_
