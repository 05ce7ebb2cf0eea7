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

#include "vatk/volume.hpp"

#include <algorithm>
#include <sstream>

namespace vatk {

void Grid3D::validate() const {
  if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1) {
    throw Refusal("grid dimensions must be at least 1 along every axis, got " + describe(*this));
  }
  if (!(spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0)) {
    throw Refusal("grid spacing must be strictly positive, got " + describe(*this));
  }
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y) || !std::isfinite(origin.z)) {
    throw Refusal("grid origin must be finite");
  }
}

std::string describe(const Grid3D& grid) {
  std::ostringstream os;
  os << grid.dims.nx << "x" << grid.dims.ny << "x" << grid.dims.nz << " @ (" << grid.spacing.x
     << ", " << grid.spacing.y << ", " << grid.spacing.z << ") m, origin (" << grid.origin.x << ", "
     << grid.origin.y << ", " << grid.origin.z << ") m";
  return os.str();
}

void require_same_grid(const Grid3D& a, const Grid3D& b, const std::string& what) {
  if (!(a == b)) {
    throw Refusal(what + ": grid mismatch (" + describe(a) + " vs " + describe(b) + ")");
  }
}

void require_same_spacing(const Grid3D& a, const Grid3D& b, const std::string& what) {
  for (int axis = 0; axis < 3; ++axis) {
    const double sa = a.spacing[axis];
    const double sb = b.spacing[axis];
    if (std::abs(sa - sb) > 1e-9 * std::max(std::abs(sa), std::abs(sb))) {
      throw Refusal(what + ": voxel spacing mismatch (" + describe(a) + " vs " + describe(b) + ")");
    }
  }
}

namespace {

template <typename F>
RealVolume map_real(const ComplexVolume& v, F f) {
  RealVolume out(v.grid());
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = f(v[n]);
  return out;
}

}  // namespace

RealVolume real_part(const ComplexVolume& v) {
  return map_real(v, [](Complex c) { return c.real(); });
}

RealVolume imag_part(const ComplexVolume& v) {
  return map_real(v, [](Complex c) { return c.imag(); });
}

RealVolume magnitude(const ComplexVolume& v) {
  return map_real(v, [](Complex c) { return std::abs(c); });
}

ComplexVolume to_complex(const RealVolume& v) {
  ComplexVolume out(v.grid());
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = Complex(v[n], 0.0);
  return out;
}

std::size_t argmax_abs(const ComplexVolume& v) {
  std::size_t best = 0;
  double best_norm = -1.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double m = std::norm(v[n]);
    if (m > best_norm) {
      best_norm = m;
      best = n;
    }
  }
  return best;
}

std::size_t argmax(const RealVolume& v) {
  const auto values = v.values();
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

bool all_finite(const ComplexVolume& v) {
  return std::all_of(v.values().begin(), v.values().end(),
                     [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

bool all_finite(const RealVolume& v) {
  return std::all_of(v.values().begin(), v.values().end(), [](double x) { return std::isfinite(x); });
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double l2_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (Complex c : v) s += std::norm(c);
  return std::sqrt(s);
}

double relative_l2(const RealVolume& a, const RealVolume& b) {
  require_same_grid(a.grid(), b.grid(), "relative_l2");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    num += (a[n] - b[n]) * (a[n] - b[n]);
    den += b[n] * b[n];
  }
  return std::sqrt(num / den);
}

double relative_l2(const ComplexVolume& a, const ComplexVolume& b) {
  require_same_grid(a.grid(), b.grid(), "relative_l2");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    num += std::norm(a[n] - b[n]);
    den += std::norm(b[n]);
  }
  return std::sqrt(num / den);
}

IndexBox centred_box(const Grid3D& grid, std::array<std::size_t, 3> centre, Dims dims) {
  IndexBox box;
  for (int a = 0; a < 3; ++a) {
    const long start = static_cast<long>(centre[a]) - static_cast<long>(dims[a] / 2);
    const long stop = start + static_cast<long>(dims[a]);
    box.lo[a] = static_cast<std::size_t>(std::max(0L, start));
    box.hi[a] = static_cast<std::size_t>(std::clamp(stop, 0L, static_cast<long>(grid.dims[a])));
  }
  return box;
}

}  // namespace vatk
