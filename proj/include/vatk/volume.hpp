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
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vatk/error.hpp"

namespace vatk {

using Complex = std::complex<double>;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
};

enum class Axis { x = 0, y = 1, z = 2 };

struct Dims {
  std::size_t nx = 1;
  std::size_t ny = 1;
  std::size_t nz = 1;

  std::size_t size() const { return nx * ny * nz; }
  std::size_t operator[](int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  std::size_t& operator[](int axis) { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Regular voxel lattice. Positions are in metres, relative to the centre of the
/// transducer face, with z along the beam axis.
struct Grid3D {
  Dims dims;
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin;

  void validate() const;

  std::size_t size() const { return dims.size(); }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + dims.nx * (j + dims.ny * k);
  }
  std::array<std::size_t, 3> unravel(std::size_t n) const {
    return {n % dims.nx, (n / dims.nx) % dims.ny, n / (dims.nx * dims.ny)};
  }
  Vec3 position(std::size_t i, std::size_t j, std::size_t k) const {
    return {origin.x + static_cast<double>(i) * spacing.x,
            origin.y + static_cast<double>(j) * spacing.y,
            origin.z + static_cast<double>(k) * spacing.z};
  }
  double voxel_volume() const { return spacing.x * spacing.y * spacing.z; }

  friend bool operator==(const Grid3D&, const Grid3D&) = default;
};

std::string describe(const Grid3D& grid);

/// Voxel values on a Grid3D, x-fastest.
template <typename T>
class Volume {
 public:
  using value_type = T;

  Volume() = default;
  explicit Volume(Grid3D grid, T fill = T{}) : grid_(grid), values_(grid.size(), fill) {
    grid_.validate();
  }
  Volume(Grid3D grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.size()) {
      throw Refusal("volume payload has " + std::to_string(values_.size()) +
                    " values but the grid holds " + std::to_string(grid_.size()));
    }
  }

  const Grid3D& grid() const { return grid_; }
  const Dims& dims() const { return grid_.dims; }
  std::size_t size() const { return values_.size(); }

  T& operator[](std::size_t n) { return values_[n]; }
  const T& operator[](std::size_t n) const { return values_[n]; }
  T& operator()(std::size_t i, std::size_t j, std::size_t k) { return values_[grid_.index(i, j, k)]; }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[grid_.index(i, j, k)];
  }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::vector<T>& storage() { return values_; }
  const std::vector<T>& storage() const { return values_; }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  Grid3D grid_;
  std::vector<T> values_;
};

using RealVolume = Volume<double>;
using ComplexVolume = Volume<Complex>;

/// Half-open voxel index box [lo, hi).
struct IndexBox {
  std::array<std::size_t, 3> lo{};
  std::array<std::size_t, 3> hi{};

  Dims dims() const { return {hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]}; }
  bool empty() const { return hi[0] <= lo[0] || hi[1] <= lo[1] || hi[2] <= lo[2]; }
  bool contains(std::size_t i, std::size_t j, std::size_t k) const {
    return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2];
  }
};

/// Sub-volume covering `box`, with the origin moved to the box's first voxel.
template <typename T>
Volume<T> crop(const Volume<T>& v, const IndexBox& box) {
  if (box.empty()) throw Refusal("crop: empty box");
  for (int a = 0; a < 3; ++a) {
    if (box.hi[a] > v.dims()[a]) throw Refusal("crop: box extends past the grid " + describe(v.grid()));
  }
  Grid3D g = v.grid();
  g.dims = box.dims();
  g.origin = v.grid().position(box.lo[0], box.lo[1], box.lo[2]);
  Volume<T> out(g);
  for (std::size_t k = 0; k < g.dims.nz; ++k) {
    for (std::size_t j = 0; j < g.dims.ny; ++j) {
      for (std::size_t i = 0; i < g.dims.nx; ++i) {
        out(i, j, k) = v(box.lo[0] + i, box.lo[1] + j, box.lo[2] + k);
      }
    }
  }
  return out;
}

/// Box of `dims` centred on voxel `centre`, clipped to `grid`.
IndexBox centred_box(const Grid3D& grid, std::array<std::size_t, 3> centre, Dims dims);

/// Throws Refusal naming `what` unless both grids are identical.
void require_same_grid(const Grid3D& a, const Grid3D& b, const std::string& what);
/// Throws Refusal naming `what` unless voxel spacings agree to a relative 1e-9.
void require_same_spacing(const Grid3D& a, const Grid3D& b, const std::string& what);

RealVolume real_part(const ComplexVolume& v);
RealVolume imag_part(const ComplexVolume& v);
RealVolume magnitude(const ComplexVolume& v);
ComplexVolume to_complex(const RealVolume& v);

/// Index of the voxel with the largest |value|; ties resolve to the lowest index.
std::size_t argmax_abs(const ComplexVolume& v);
std::size_t argmax(const RealVolume& v);

bool all_finite(const ComplexVolume& v);
bool all_finite(const RealVolume& v);

double l2_norm(std::span<const double> v);
double l2_norm(std::span<const Complex> v);

/// ||a - b|| / ||b||.
double relative_l2(const RealVolume& a, const RealVolume& b);
double relative_l2(const ComplexVolume& a, const ComplexVolume& b);

}  // namespace vatk
