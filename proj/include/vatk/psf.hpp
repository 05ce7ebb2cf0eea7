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

#include "vatk/volume.hpp"

namespace vatk {

/// Complex point spread function of the two-beam system, scaled to unit peak magnitude.
struct Psf {
  ComplexVolume volume;
  double normalization = 1.0;  ///< factor applied to conj(p1) p2 to reach max |h| = 1
};

/// Grid of `dims` voxels at `spacing` whose voxel (nx/2, ny/2, nz/2) sits on the focus
/// (0, 0, focal_distance).
Grid3D focal_grid(Dims dims, Vec3 spacing, double focal_distance);

/// Default PSF support for an image grid: the image spacing and half the image extent per
/// axis, centred on the focus. A one voxel thick lateral axis of the image gets the other
/// lateral axis' count, so the PSF can be integrated along it (see line_kernel). Linear
/// convolution with a kernel of this size keeps the blur of objects in the central half of
/// the field inside the image.
Grid3D kernel_grid(const Grid3D& image_grid, double focal_distance);

/// h = conj(p1) * p2 per voxel, scaled so that max |h| = 1.
Psf make_psf(const ComplexVolume& p1, const ComplexVolume& p2);

/// Sums `v` along `axis`, yielding a volume one voxel thick on that axis, positioned at the
/// peak voxel's coordinate on that axis.
ComplexVolume collapse_axis(const ComplexVolume& v, Axis axis);

/// Convolution kernel for images on `image_grid`: the PSF integrated along every axis on
/// which the image is one voxel thick (objects invariant along it), otherwise the PSF itself.
/// Refuses when the spacing differs on an axis that is not integrated.
ComplexVolume line_kernel(const Psf& psf, const Grid3D& image_grid);

/// Noiseless image of a wire phantom. When the phantom is one voxel thick along an axis on
/// which the PSF is extended, the wire is taken as invariant along that axis and the PSF is
/// integrated along it first.
ComplexVolume make_theoretical_lsf(const Psf& psf, const RealVolume& wire_phantom);

/// |magnitude_source| * exp(i arg(phase_source)); zero phase where phase_source is zero.
ComplexVolume compose_lsf(const ComplexVolume& magnitude_source, const ComplexVolume& phase_source);

/// `source` resampled onto `target`'s grid by an integer voxel shift that lands the magnitude
/// peak of `source` on the magnitude peak voxel of `target`. Voxels with no source are zero.
/// Used to bring a theoretical LSF onto the grid of an estimated one before compose_lsf.
ComplexVolume align_to_peak(const ComplexVolume& source, const ComplexVolume& target);

/// -6 dB widths of |h| along lines through its peak, with linear interpolation of the
/// half-amplitude crossings. Metres.
struct ResolutionCell {
  double width_x = 0.0;
  double width_y = 0.0;
  double extent_z = 0.0;
};

ResolutionCell measure_resolution(const ComplexVolume& h);

/// Full width of a sampled profile at `level` times its maximum, around the maximum sample.
/// Returns nullopt if the profile does not fall below the level on both sides.
std::optional<double> width_at_level(std::span<const double> profile, double spacing, double level);

}  // namespace vatk
