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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vatk/volume.hpp"

namespace vatk {

/// Difference-frequency time series recorded at one pixel.
struct PixelSequence {
  std::vector<double> samples;
  double sample_rate = 1.0e6;  ///< Hz
  double diff_freq = 50.0e3;   ///< Hz

  void validate() const;
};

/// Discrete Hilbert transform: multiplies the spectrum by -i sign(frequency). The DC and, for
/// even lengths, the Nyquist bin are zeroed. Requires at least 4 samples.
std::vector<double> hilbert(std::span<const double> x);

/// x + i hilbert(x)
std::vector<Complex> analytic_signal(std::span<const double> x);

/// Tone amplitude estimated as sqrt(2) times the RMS of the samples.
double tone_amplitude(std::span<const double> x);

/// Phase of xj relative to xi, wrapped to (-pi, pi]: the average over samples of
/// arg(zj conj(zi)) with z the analytic signals. Per-sample angles are taken on the branch
/// centred on the angle of the summed product, so offsets near +-pi average correctly.
double relative_phase(const PixelSequence& xi, const PixelSequence& xj);

/// One sequence per voxel of `grid`, all sharing length, rate and difference frequency.
struct SequenceSet {
  Grid3D grid;
  std::size_t length = 0;
  double sample_rate = 1.0e6;
  double diff_freq = 50.0e3;
  std::vector<double> samples;  ///< pixel-major: pixel p occupies [p * length, (p + 1) * length)

  void validate() const;
  std::span<const double> pixel(std::size_t p) const {
    return std::span<const double>(samples).subspan(p * length, length);
  }
  PixelSequence sequence(std::size_t p) const;
};

struct PhaseMap {
  std::size_t reference_pixel = 0;
  RealVolume phases;      ///< radians relative to the reference, in (-pi, pi]
  RealVolume amplitudes;  ///< sqrt(2) RMS
  RealVolume mask;        ///< 1 where the pixel had zero amplitude and its phase was set to 0
};

/// Throws Refusal if the reference pixel itself has zero amplitude.
PhaseMap build_phase_map(const SequenceSet& set, std::size_t reference_pixel);

struct SequenceNoise {
  double snr_db = 20.0;  ///< mean tone power over mean noise power, across all pixels
  std::uint64_t seed = 0;
};

/// Tones x_p[n] = |v_p| cos(2 pi diff_freq n / sample_rate + arg v_p) for every voxel of
/// `image`, optionally with white Gaussian noise of one variance for all pixels.
SequenceSet synthesize_sequences(const ComplexVolume& image, double sample_rate, double diff_freq,
                                 std::size_t length, const std::optional<SequenceNoise>& noise = {});

/// |image| and phase relative to the reference pixel, packed as a complex image.
ComplexVolume phase_map_image(const PhaseMap& map);

/// Gaussian low-pass on the image grid, gain exp(-ln2 (nu / cutoff)^2) with nu the radial
/// spatial frequency in cycles per metre (half gain at the cutoff).
ComplexVolume gaussian_lowpass(const ComplexVolume& image, double cutoff);

/// Image minus its Gaussian low-pass at `cutoff` (cycles per metre). Restoring this image with
/// an LSF estimated from it keeps the convolution model consistent: both carry the same filter.
ComplexVolume spectral_inversion(const ComplexVolume& image, double cutoff);

/// Line spread function isolated by spectral inversion: image minus its low-pass, restricted
/// to `region`, re-centred so the magnitude peak sits on the centre voxel of a region-sized
/// grid (voxels falling outside the region are zero), and scaled to unit peak magnitude.
/// `cutoff` is in cycles per metre.
ComplexVolume estimate_lsf(const ComplexVolume& image, const IndexBox& region, double cutoff);

/// One tenth of the reciprocal wire diameter, in cycles per metre.
double default_lsf_cutoff(double wire_diameter);

}  // namespace vatk
