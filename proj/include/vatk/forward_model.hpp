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

#pragma once

#include <cstdint>
#include <limits>

#include "vatk/volume.hpp"

namespace vatk {

struct NoiseSpec {
  /// Signal-to-noise ratio in dB; +infinity disables noise.
  double snr_db = 20.0;
  std::uint64_t seed = 0;

  static constexpr double noiseless = std::numeric_limits<double>::infinity();
};

/// Transform size used for the zero-padded linear convolution of arrays of dims f and h.
Dims linear_convolution_dims(Dims f, Dims h);

/// Linear (zero-padded) convolution g = f * h evaluated with FFTs, cropped back to f's
/// grid. The voxel of max |h| is the alignment reference, so an object voxel maps onto
/// the same voxel of g. f and h must share voxel spacing.
ComplexVolume convolve(const ComplexVolume& f, const ComplexVolume& h);
ComplexVolume convolve(const RealVolume& f, const ComplexVolume& h);

/// Uncropped circular result on the padded transform grid (dims = linear_convolution_dims).
std::vector<Complex> convolve_padded(const ComplexVolume& f, const ComplexVolume& h);

/// Adds i.i.d. circular complex Gaussian noise with total power mean|g|^2 / 10^(snr/10),
/// split evenly between real and imaginary parts. Same seed, same realisation.
ComplexVolume add_noise(const ComplexVolume& g, const NoiseSpec& noise);

/// mean |v|^2
double mean_power(const ComplexVolume& v);

}  // namespace vatk
