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

struct SphereInclusion {
  Vec3 center;         ///< m
  double radius = 0;   ///< m
  double contrast_db = 0;  ///< attenuation below full scale, >= 0
};

/// Infinite straight cylinder.
struct WireSpec {
  double diameter = 0;  ///< m
  Vec3 axis_point;      ///< m
  Vec3 axis_direction{0, 1, 0};
  double contrast_db = 0;
};

struct PhantomSpec {
  Grid3D grid;
  double dynamic_range_db = 48.0;
  std::vector<SphereInclusion> spheres;
  std::vector<WireSpec> wires;
  double background = 0.0;  ///< fraction of full scale

  void validate() const;
};

/// 10^(-contrast_db / 20)
double contrast_to_amplitude(double contrast_db);

/// Voxels whose centre lies inside an inclusion take its amplitude (the largest one where
/// inclusions overlap); all others take the background value.
RealVolume render_phantom(const PhantomSpec& spec);

/// 128 x 128 x 256 voxels of 0.25 mm, centred laterally on the beam axis, with the focal
/// plane on voxel plane 128.
Grid3D desk_grid(double focal_distance);
/// 256 x 256 x 512 voxels of 0.125 mm, same placement as desk_grid.
Grid3D full_grid(double focal_distance);
/// 30 x 70 mm scan plane (x, z) at `pitch`, one voxel thick in y, focus at its centre.
Grid3D wire_scan_grid(double focal_distance, double pitch = 0.1e-3);

/// Built-in phantoms: "phantom1", "phantom2", "wire3". Positions are relative to the focus
/// at `focal_distance` on the beam axis; `grid` replaces the default grid when provided.
PhantomSpec builtin_phantom(const std::string& name, double focal_distance);
PhantomSpec builtin_phantom(const std::string& name, double focal_distance, const Grid3D& grid);

}  // namespace vatk
