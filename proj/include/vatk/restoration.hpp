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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vatk/volume.hpp"

namespace vatk {

enum class FilterKind { wiener, cls, gm };

std::string to_string(FilterKind kind);
FilterKind parse_filter(const std::string& name);

/// Regularisers are expressed relative to the kernel energy s^2 = sum |h|^2, which is the
/// mean of |H|^2 over the transform grid. A noise-to-signal ratio of q therefore adds
/// q * mean|H|^2 to every denominator, so q = 10^(-snr/10) matches a white-noise image at
/// that SNR independently of how h is scaled or padded.
struct FilterParams {
  FilterKind kind = FilterKind::wiener;
  double gamma = 1.0;  ///< cls: Laplacian weight; gm: multiplier on the noise-to-signal term
  double alpha = 0.5;  ///< gm blend exponent; 1 is the inverse filter, 0 the parametric Wiener
  double nsr = 0.01;   ///< scalar noise-to-signal ratio
  /// Optional per-frequency ratio on the transform grid (DC at index 0); overrides nsr.
  /// Only its dims and values are used.
  std::optional<RealVolume> nsr_spectrum;

  void validate() const;
};

/// Noise-to-signal ratio implied by a white-noise SNR in dB.
double default_nsr(double snr_db);

struct RestorationResult {
  RealVolume restored_real;
  double imag_residual_norm = 0.0;  ///< ||Im f^|| / ||Re f^||
  std::size_t guarded_bins = 0;     ///< bins whose gain was forced to zero
};

/// |P|^2 of the 7-point Laplacian on a periodic grid of `dims`, DC at index 0.
std::vector<double> laplacian_power_spectrum(Dims dims);

/// Frequency-domain deconvolution of images on one grid by one kernel. Filtering runs on the
/// same zero-padded transform grid as the forward model's linear convolution: the image is
/// zero-extended, the kernel is embedded with its peak voxel at the origin, and the estimate
/// is cropped back to the image grid. The kernel spectrum is computed once.
class Deconvolver {
 public:
  Deconvolver(const ComplexVolume& kernel, const Grid3D& image_grid);

  RestorationResult apply(const ComplexVolume& g, const FilterParams& params) const;

  const Grid3D& image_grid() const { return grid_; }
  /// Dims of the transform grid; a per-frequency noise-to-signal volume must have these dims.
  const Dims& transform_dims() const { return transform_; }
  double kernel_energy() const { return energy_; }

 private:
  std::vector<Complex> image_spectrum(const ComplexVolume& g) const;

  Grid3D grid_;
  Dims transform_;
  std::vector<Complex> transfer_;
  double energy_ = 0.0;
};

RestorationResult restore(const ComplexVolume& g, const ComplexVolume& h, const FilterParams& params);

RestorationResult wiener(const ComplexVolume& g, const ComplexVolume& h, double nsr);
RestorationResult cls(const ComplexVolume& g, const ComplexVolume& h, double gamma);
RestorationResult gm(const ComplexVolume& g, const ComplexVolume& h, double alpha, double gamma,
                     double nsr);

struct SweepEntry {
  FilterParams params;
  double score = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> entries;  ///< in evaluation order
  std::size_t best = 0;
};

/// Evaluates every combination of the given parameter lists for `kind` and keeps the one
/// with the highest score (UIQI against a reference, in practice). Lists that do not apply
/// to `kind` are ignored.
SweepResult parameter_sweep(const Deconvolver& deconvolver, const ComplexVolume& g, FilterKind kind,
                            const std::vector<double>& gammas, const std::vector<double>& alphas,
                            const std::vector<double>& nsrs,
                            const std::function<double(const RealVolume&)>& score);

}  // namespace vatk
