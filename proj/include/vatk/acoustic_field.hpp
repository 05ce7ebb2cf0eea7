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

#include <string>
#include <vector>

#include "vatk/volume.hpp"

namespace vatk {

/// Two-element confocal spherical transducer: an inner spherical cap and an outer
/// annular ring sharing one geometric focus. Lengths in metres, frequencies in Hz.
struct TransducerSpec {
  double inner_radius = 14.8e-3;
  double ring_inner_radius = 15.2e-3;
  double ring_outer_radius = 22.0e-3;
  double focal_distance = 70.0e-3;
  double freq_inner = 3.075e6;
  double freq_outer = 3.125e6;

  void validate() const;
};

enum class Element { inner, outer };

std::string to_string(Element e);
Element parse_element(const std::string& name);

struct Medium {
  double sound_speed = 1500.0;  ///< m/s
  double density = 1000.0;      ///< kg/m^3

  void validate() const;
};

double drive_frequency(const TransducerSpec& spec, Element element);
double wavenumber(const TransducerSpec& spec, Element element, const Medium& medium);
double wavelength(const TransducerSpec& spec, Element element, const Medium& medium);

/// Surface element of a discretised aperture. The normal points from the face towards
/// the focus.
struct Patch {
  Vec3 center;
  double area = 0.0;
  Vec3 normal;
};

/// Tiles one element with patches whose edges do not exceed `patch_target`.
///
/// The element surface is cut into rings of equal polar-angle width, and each ring into
/// equal azimuthal sectors; each patch carries the exact area of its sector, so the tiling
/// is area-exact. Centres sit on the sphere at the area-median polar angle of their ring.
/// Throws Refusal when the element has zero area or patch_target exceeds half a wavelength.
std::vector<Patch> discretize_aperture(const TransducerSpec& spec, Element element,
                                       double patch_target, const Medium& medium = {});

struct FieldOptions {
  double patch_target = 0.0;     ///< m; 0 selects a quarter wavelength
  double radial_step = 0.0;      ///< m; radial table node spacing, 0 selects a quarter wavelength
  double normal_velocity = 1.0;  ///< uniform normal surface velocity u0, m/s
};

/// Rayleigh–Sommerfeld patch sum for one element:
///   p(r) = (i rho c k / 2 pi) u0 sum_patches exp(i k |r - r_p|) / |r - r_p| dA.
class ApertureSum {
 public:
  ApertureSum(const TransducerSpec& spec, Element element, const Medium& medium,
              const FieldOptions& options = {});

  /// Pressure at an arbitrary point; throws Refusal if the point coincides with a patch centre.
  Complex at(const Vec3& point) const;

  /// Pressure at (radius, 0, z). Uses the mirror symmetry of the tiling about the xz plane,
  /// which halves the work.
  Complex on_meridian(double radius, double z) const;

  std::size_t patch_count() const { return count_; }
  double wavenumber() const { return k_; }

 private:
  Complex sum(const std::vector<double>& x, const std::vector<double>& y,
              const std::vector<double>& z, const std::vector<double>& w, const Vec3& p) const;

  double k_ = 0.0;
  Complex prefactor_;
  std::size_t count_ = 0;
  std::vector<double> x_, y_, z_, w_;
  std::vector<double> fx_, fy_, fz_, fw_;  // tiling folded onto azimuths in [0, pi]
};

/// Complex pressure of one element tabulated on (radius, depth) nodes. The aperture is
/// axisymmetric, so the field at lateral distance rho from the beam axis is obtained by
/// cubic Lagrange interpolation between exact patch sums at uniformly spaced radii.
class AxisymmetricField {
 public:
  AxisymmetricField(const TransducerSpec& spec, Element element, const Medium& medium,
                    std::vector<double> depths, double max_radius, const FieldOptions& options = {});

  Complex at(double radius, std::size_t depth_index) const;
  const std::vector<double>& depths() const { return depths_; }
  double radial_step() const { return step_; }

  /// Fills every voxel of `grid`; its z planes must coincide with depths().
  ComplexVolume sample(const Grid3D& grid) const;

 private:
  std::vector<double> depths_;
  double step_ = 0.0;
  std::size_t nodes_ = 0;
  std::vector<Complex> table_;  // [depth][node]
};

std::vector<double> grid_depths(const Grid3D& grid);
double max_lateral_radius(const Grid3D& grid);

/// Linear pressure amplitude of one element on every voxel of `grid`.
/// Throws Refusal when the grid reaches behind the transducer face or a voxel coincides
/// with a patch centre.
ComplexVolume compute_pressure_field(const TransducerSpec& spec, Element element,
                                     const Medium& medium, const Grid3D& grid,
                                     const FieldOptions& options = {});

}  // namespace vatk
