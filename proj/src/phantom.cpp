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

#include "vatk/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vatk {

double contrast_to_amplitude(double contrast_db) { return std::pow(10.0, -contrast_db / 20.0); }

namespace {

struct Box {
  Vec3 lo;
  Vec3 hi;
};

// Region covered by the voxels, each voxel extending half a pitch around its centre.
Box grid_box(const Grid3D& g) {
  Box b;
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = g.origin[a] - 0.5 * g.spacing[a];
    b.hi[a] = g.origin[a] + (static_cast<double>(g.dims[a]) - 0.5) * g.spacing[a];
  }
  return b;
}

Vec3 unit(Vec3 v) {
  const double n = v.norm();
  return {v.x / n, v.y / n, v.z / n};
}

std::string sphere_name(std::size_t n) { return "sphere " + std::to_string(n); }
std::string wire_name(std::size_t n) { return "wire " + std::to_string(n); }

void check_contrast(double db, double range, const std::string& who) {
  if (!std::isfinite(db) || db < 0.0 || db > range) {
    throw Refusal(who + ": contrast " + std::to_string(db) + " dB outside [0, " +
                  std::to_string(range) + "] dB");
  }
}

// Parametric interval of the line p + t d inside the box, or empty.
bool line_meets_box(Vec3 p, Vec3 d, const Box& box) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-12) {
      if (p[a] < box.lo[a] || p[a] > box.hi[a]) return false;
      continue;
    }
    double ta = (box.lo[a] - p[a]) / d[a];
    double tb = (box.hi[a] - p[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return t0 <= t1;
}

}  // namespace

void PhantomSpec::validate() const {
  grid.validate();
  if (!std::isfinite(dynamic_range_db) || dynamic_range_db <= 0.0) {
    throw Refusal("phantom: dynamic range must be > 0 dB");
  }
  if (!(background >= 0.0 && background <= 1.0)) {
    throw Refusal("phantom: background must lie in [0, 1]");
  }
  const Box box = grid_box(grid);
  for (std::size_t n = 0; n < spheres.size(); ++n) {
    const auto& s = spheres[n];
    if (!(s.radius > 0.0)) throw Refusal(sphere_name(n) + ": radius must be > 0");
    check_contrast(s.contrast_db, dynamic_range_db, sphere_name(n));
    for (int a = 0; a < 3; ++a) {
      // A one-voxel-thick axis is a cut plane, which the sphere only has to cross.
      const bool fits = grid.dims[a] == 1
                            ? s.center[a] + s.radius >= box.lo[a] && s.center[a] - s.radius <= box.hi[a]
                            : s.center[a] - s.radius >= box.lo[a] && s.center[a] + s.radius <= box.hi[a];
      if (!fits) {
        throw Refusal(sphere_name(n) + " (radius " + std::to_string(s.radius) +
                      " m) does not fit within the grid " + describe(grid));
      }
    }
  }
  for (std::size_t n = 0; n < wires.size(); ++n) {
    const auto& w = wires[n];
    if (!(w.diameter > 0.0)) throw Refusal(wire_name(n) + ": diameter must be > 0");
    if (!(w.axis_direction.norm() > 0.0)) throw Refusal(wire_name(n) + ": axis direction is zero");
    check_contrast(w.contrast_db, dynamic_range_db, wire_name(n));
    const Vec3 d = unit(w.axis_direction);
    Box inner = box;
    for (int a = 0; a < 3; ++a) {
      if (std::abs(d[a]) < 1.0 - 1e-9) {
        inner.lo[a] += 0.5 * w.diameter;
        inner.hi[a] -= 0.5 * w.diameter;
      }
    }
    if (!line_meets_box(w.axis_point, d, inner)) {
      throw Refusal(wire_name(n) + " (diameter " + std::to_string(w.diameter) +
                    " m) does not fit within the grid " + describe(grid));
    }
  }
}

RealVolume render_phantom(const PhantomSpec& spec) {
  spec.validate();
  const Grid3D& g = spec.grid;
  // Largest amplitude of the inclusions containing each voxel; -1 outside all of them.
  RealVolume inside(spec.grid, -1.0);
  for (const auto& s : spec.spheres) {
    const double amp = contrast_to_amplitude(s.contrast_db);
    const double r2 = s.radius * s.radius;
    for (std::size_t k = 0; k < g.dims.nz; ++k) {
      for (std::size_t j = 0; j < g.dims.ny; ++j) {
        for (std::size_t i = 0; i < g.dims.nx; ++i) {
          const Vec3 d = g.position(i, j, k) - s.center;
          if (d.dot(d) <= r2) inside(i, j, k) = std::max(inside(i, j, k), amp);
        }
      }
    }
  }
  for (const auto& w : spec.wires) {
    const double amp = contrast_to_amplitude(w.contrast_db);
    const double r2 = 0.25 * w.diameter * w.diameter;
    const Vec3 axis = unit(w.axis_direction);
    for (std::size_t k = 0; k < g.dims.nz; ++k) {
      for (std::size_t j = 0; j < g.dims.ny; ++j) {
        for (std::size_t i = 0; i < g.dims.nx; ++i) {
          const Vec3 d = g.position(i, j, k) - w.axis_point;
          const double along = d.dot(axis);
          if (d.dot(d) - along * along <= r2) inside(i, j, k) = std::max(inside(i, j, k), amp);
        }
      }
    }
  }
  for (double& v : inside.values()) {
    if (v < 0.0) v = spec.background;
  }
  return inside;
}

namespace {

Grid3D centred_grid(Dims dims, double pitch, double focal_distance) {
  Grid3D g;
  g.dims = dims;
  g.spacing = {pitch, pitch, pitch};
  g.origin = {-static_cast<double>(dims.nx / 2) * pitch, -static_cast<double>(dims.ny / 2) * pitch,
              focal_distance - static_cast<double>(dims.nz / 2) * pitch};
  return g;
}

}  // namespace

Grid3D desk_grid(double focal_distance) { return centred_grid({128, 128, 256}, 0.25e-3, focal_distance); }

Grid3D full_grid(double focal_distance) { return centred_grid({256, 256, 512}, 0.125e-3, focal_distance); }

Grid3D wire_scan_grid(double focal_distance, double pitch) {
  if (!(pitch > 0.0)) throw Refusal("wire scan pitch must be > 0");
  const auto nx = static_cast<std::size_t>(std::llround(30e-3 / pitch));
  const auto nz = static_cast<std::size_t>(std::llround(70e-3 / pitch));
  Grid3D g = centred_grid({nx, 1, nz}, pitch, focal_distance);
  g.origin.y = 0.0;
  return g;
}

PhantomSpec builtin_phantom(const std::string& name, double focal_distance) {
  if (name == "wire3") return builtin_phantom(name, focal_distance, wire_scan_grid(focal_distance));
  return builtin_phantom(name, focal_distance, desk_grid(focal_distance));
}

PhantomSpec builtin_phantom(const std::string& name, double focal_distance, const Grid3D& grid) {
  const double mm = 1e-3;
  const double f = focal_distance;
  PhantomSpec spec;
  spec.grid = grid;
  spec.dynamic_range_db = 48.0;
  spec.background = 0.0;
  if (name == "phantom1" || name == "phantom2") {
    spec.spheres = {
        {{-10 * mm, 0, f + 6 * mm}, 4 * mm, 36.0},
        {{0, 0, f + 6 * mm}, 4 * mm, 0.0},
        {{10 * mm, 0, f + 6 * mm}, 4 * mm, 42.0},
    };
    if (name == "phantom2") {
      spec.spheres.push_back({{0, -8 * mm, f + 8 * mm}, 2 * mm, 46.0});
      spec.spheres.push_back({{0, 8 * mm, f + 8 * mm}, 2 * mm, 46.0});
    }
  } else if (name == "wire3") {
    for (double step : {-1.0, 0.0, 1.0}) {
      spec.wires.push_back({0.5 * mm, {5 * mm * step, 0, f + 14 * mm * step}, {0, 1, 0}, 0.0});
    }
  } else {
    throw Refusal("unknown builtin phantom '" + name + "' (expected phantom1, phantom2 or wire3)");
  }
  spec.validate();
  return spec;
}

}  // namespace vatk
