/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The vatk Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vatk/forward_model.hpp"

#include <cmath>
#include <random>

#include "vatk/fft.hpp"
#include "vatk/spectral.hpp"

namespace vatk {

Dims linear_convolution_dims(Dims f, Dims h) {
  return {next_fast_size(f.nx + h.nx - 1), next_fast_size(f.ny + h.ny - 1),
          next_fast_size(f.nz + h.nz - 1)};
}

std::vector<Complex> convolve_padded(const ComplexVolume& f, const ComplexVolume& h) {
  require_same_spacing(f.grid(), h.grid(), "convolve");
  const Dims padded = linear_convolution_dims(f.dims(), h.dims());

  std::vector<Complex> spectrum(padded.size());
  const Dims fd = f.dims();
  for (std::size_t k = 0; k < fd.nz; ++k) {
    for (std::size_t j = 0; j < fd.ny; ++j) {
      for (std::size_t i = 0; i < fd.nx; ++i) {
        spectrum[i + padded.nx * (j + padded.ny * k)] = f(i, j, k);
      }
    }
  }
  fft3d(spectrum, padded, FftDirection::forward);
  {
    auto kernel = embed_kernel(h, padded, argmax_abs(h));
    fft3d(kernel, padded, FftDirection::forward);
    for (std::size_t n = 0; n < spectrum.size(); ++n) spectrum[n] *= kernel[n];
  }
  fft3d(spectrum, padded, FftDirection::inverse);
  const double scale = 1.0 / static_cast<double>(padded.size());
  for (auto& v : spectrum) v *= scale;
  return spectrum;
}

ComplexVolume convolve(const ComplexVolume& f, const ComplexVolume& h) {
  const auto full = convolve_padded(f, h);
  const Dims padded = linear_convolution_dims(f.dims(), h.dims());
  ComplexVolume g(f.grid());
  const Dims fd = f.dims();
  for (std::size_t k = 0; k < fd.nz; ++k) {
    for (std::size_t j = 0; j < fd.ny; ++j) {
      for (std::size_t i = 0; i < fd.nx; ++i) {
        g(i, j, k) = full[i + padded.nx * (j + padded.ny * k)];
      }
    }
  }
  return g;
}

ComplexVolume convolve(const RealVolume& f, const ComplexVolume& h) {
  return convolve(to_complex(f), h);
}

double mean_power(const ComplexVolume& v) {
  double s = 0.0;
  for (Complex c : v.values()) s += std::norm(c);
  return s / static_cast<double>(v.size());
}

ComplexVolume add_noise(const ComplexVolume& g, const NoiseSpec& noise) {
  if (std::isnan(noise.snr_db)) throw Refusal("add_noise: snr_db must not be NaN");
  const double signal = mean_power(g);
  if (!(signal > 0.0)) throw Refusal("add_noise: image is identically zero, SNR is undefined");
  if (noise.snr_db == NoiseSpec::noiseless) return g;
  if (std::isinf(noise.snr_db)) throw Refusal("add_noise: snr_db of -infinity is not meaningful");

  const double noise_power = signal / std::pow(10.0, noise.snr_db / 10.0);
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> component(0.0, std::sqrt(0.5 * noise_power));
  ComplexVolume out = g;
  for (auto& v : out.values()) {
    const double re = component(rng);
    const double im = component(rng);
    v += Complex(re, im);
  }
  return out;
}

}  // namespace vatk
