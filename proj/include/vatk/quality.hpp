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

#include <optional>
#include <string>

#include "vatk/volume.hpp"

namespace vatk {

struct QualityReport {
  double isnr_db = 0.0;
  double mse = 0.0;
  double uiqi = 0.0;
};

/// mean (a - b)^2
double mse(const RealVolume& a, const RealVolume& b);

/// 10 log10( sum (f - g)^2 / sum (f - fhat)^2 ). A perfect restoration returns +infinity.
double isnr(const RealVolume& f, const RealVolume& g, const RealVolume& fhat);

enum class UiqiMode {
  slice,   ///< square windows inside each plane normal to slice_normal, averaged over all slices
  volume,  ///< cubic windows
};

struct UiqiOptions {
  std::size_t window = 8;
  UiqiMode mode = UiqiMode::slice;
  /// Plane normal in slice mode. Unset: the single one-voxel-thick axis if there is one,
  /// otherwise z.
  std::optional<Axis> slice_normal;
};

struct UiqiResult {
  double value = 0.0;
  std::size_t windows = 0;  ///< windows averaged
  std::size_t skipped = 0;  ///< windows with a vanishing denominator
};

/// Universal image quality index averaged over all sliding-window positions (stride 1).
/// Throws Refusal when no window has a nonzero denominator.
UiqiResult uiqi_detail(const RealVolume& a, const RealVolume& b, const UiqiOptions& options = {});
double uiqi(const RealVolume& a, const RealVolume& b, const UiqiOptions& options = {});

/// Mapping of restored intensities onto the [0, 1] scale of the phantom before MSE and UIQI.
enum class IntensityScale {
  none,   ///< values used as they are
  clamp,  ///< clipped to [0, 1]
  peak,   ///< divided by the maximum, then negatives clipped to 0
};

std::string to_string(IntensityScale scale);
IntensityScale parse_intensity_scale(const std::string& name);

RealVolume rescale_intensity(const RealVolume& v, IntensityScale scale);

/// Rounds values in [0, 1] to the nearest of `levels` + 1 evenly spaced gray levels.
RealVolume quantize(const RealVolume& v, unsigned levels);

struct MetricOptions {
  UiqiOptions uiqi;
  IntensityScale scale = IntensityScale::clamp;
  unsigned levels = 255;  ///< gray levels after scaling; 0 keeps full precision
};

/// Restored image as compared by MSE and UIQI: scaled, then quantized when levels > 0.
RealVolume display_intensity(const RealVolume& restored, const MetricOptions& options);

/// ISNR uses the raw degraded and restored values; MSE and UIQI compare the reference with
/// display_intensity(restored).
QualityReport evaluate(const RealVolume& reference, const RealVolume& degraded,
                       const RealVolume& restored, const MetricOptions& options = {});

}  // namespace vatk
