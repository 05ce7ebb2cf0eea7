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

#include "vatk/psf.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vatk/forward_model.hpp"

namespace vatk {

Grid3D focal_grid(Dims dims, Vec3 spacing, double focal_distance) {
  Grid3D g;
  g.dims = dims;
  g.spacing = spacing;
  g.origin = {-static_cast<double>(dims.nx / 2) * spacing.x, -static_cast<double>(dims.ny / 2) * spacing.y,
              focal_distance - static_cast<double>(dims.nz / 2) * spacing.z};
  g.validate();
  return g;
}

Grid3D kernel_grid(const Grid3D& image_grid, double focal_distance) {
  Dims d;
  for (int a = 0; a < 3; ++a) d[a] = std::max<std::size_t>(1, image_grid.dims[a] / 2);
  // A one voxel thick lateral axis is an invariant direction: give the kernel the other
  // lateral half extent there so it can be integrated along it.
  if (image_grid.dims.nx == 1) d.nx = d.ny;
  if (image_grid.dims.ny == 1) d.ny = d.nx;
  return focal_grid(d, image_grid.spacing, focal_distance);
}

Psf make_psf(const ComplexVolume& p1, const ComplexVolume& p2) {
  require_same_grid(p1.grid(), p2.grid(), "make_psf: element fields");
  ComplexVolume h(p1.grid());
  double peak = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    h[n] = std::conj(p1[n]) * p2[n];
    peak = std::max(peak, std::abs(h[n]));
  }
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw Refusal("make_psf: conj(p1) p2 has no finite nonzero voxel");
  }
  const double scale = 1.0 / peak;
  for (auto& v : h.values()) v *= scale;
  return {std::move(h), scale};
}

ComplexVolume collapse_axis(const ComplexVolume& v, Axis axis) {
  const int a = static_cast<int>(axis);
  Grid3D out_grid = v.grid();
  const auto peak = v.grid().unravel(argmax_abs(v));
  out_grid.dims[a] = 1;
  out_grid.origin[a] += static_cast<double>(peak[a]) * v.grid().spacing[a];
  ComplexVolume out(out_grid);
  const Dims in = v.dims();
  for (std::size_t k = 0; k < in.nz; ++k) {
    for (std::size_t j = 0; j < in.ny; ++j) {
      for (std::size_t i = 0; i < in.nx; ++i) {
        const std::size_t oi = a == 0 ? 0 : i;
        const std::size_t oj = a == 1 ? 0 : j;
        const std::size_t ok = a == 2 ? 0 : k;
        out(oi, oj, ok) += v(i, j, k);
      }
    }
  }
  return out;
}

namespace {

bool spacing_matches(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(a, b); }

}  // namespace

ComplexVolume line_kernel(const Psf& psf, const Grid3D& image_grid) {
  ComplexVolume kernel = psf.volume;
  for (int a = 0; a < 3; ++a) {
    if (image_grid.dims[a] == 1 && kernel.dims()[a] > 1) {
      kernel = collapse_axis(kernel, static_cast<Axis>(a));
    }
  }
  for (int a = 0; a < 3; ++a) {
    const bool thin = image_grid.dims[a] == 1 && kernel.dims()[a] == 1;
    if (!thin && !spacing_matches(image_grid.spacing[a], kernel.grid().spacing[a])) {
      throw Refusal("voxel spacing differs between PSF (" + describe(psf.volume.grid()) +
                    ") and image (" + describe(image_grid) + ")");
    }
  }
  // Spacing along collapsed axes is irrelevant; align it so the convolution accepts the pair.
  Grid3D grid = kernel.grid();
  for (int a = 0; a < 3; ++a) {
    if (image_grid.dims[a] == 1 && kernel.dims()[a] == 1) grid.spacing[a] = image_grid.spacing[a];
  }
  return ComplexVolume(grid, std::move(kernel.storage()));
}

ComplexVolume make_theoretical_lsf(const Psf& psf, const RealVolume& wire_phantom) {
  bool any = false;
  for (double v : wire_phantom.values()) any = any || v != 0.0;
  if (!any) throw Refusal("make_theoretical_lsf: wire phantom is all zero");
  return convolve(wire_phantom, line_kernel(psf, wire_phantom.grid()));
}

ComplexVolume compose_lsf(const ComplexVolume& magnitude_source, const ComplexVolume& phase_source) {
  require_same_grid(magnitude_source.grid(), phase_source.grid(), "compose_lsf");
  ComplexVolume out(magnitude_source.grid());
  for (std::size_t n = 0; n < out.size(); ++n) {
    const double m = std::abs(magnitude_source[n]);
    const Complex p = phase_source[n];
    if (p == Complex{}) {
      out[n] = Complex(m, 0.0);
    } else {
      out[n] = std::polar(m, std::arg(p));
    }
  }
  return out;
}

ComplexVolume align_to_peak(const ComplexVolume& source, const ComplexVolume& target) {
  require_same_spacing(source.grid(), target.grid(), "align_to_peak");
  const auto s = source.grid().unravel(argmax_abs(source));
  const auto t = target.grid().unravel(argmax_abs(target));
  ComplexVolume out(target.grid());
  for (std::size_t k = 0; k < out.dims().nz; ++k) {
    for (std::size_t j = 0; j < out.dims().ny; ++j) {
      for (std::size_t i = 0; i < out.dims().nx; ++i) {
        const std::array<long, 3> src{static_cast<long>(s[0] + i) - static_cast<long>(t[0]),
                                      static_cast<long>(s[1] + j) - static_cast<long>(t[1]),
                                      static_cast<long>(s[2] + k) - static_cast<long>(t[2])};
        bool inside = true;
        for (int a = 0; a < 3; ++a) inside = inside && src[a] >= 0 && src[a] < static_cast<long>(source.dims()[a]);
        if (inside) {
          out(i, j, k) = source(static_cast<std::size_t>(src[0]), static_cast<std::size_t>(src[1]),
                                static_cast<std::size_t>(src[2]));
        }
      }
    }
  }
  return out;
}

std::optional<double> width_at_level(std::span<const double> profile, double spacing, double level) {
  if (profile.empty()) return std::nullopt;
  const auto peak_it = std::max_element(profile.begin(), profile.end());
  const std::size_t peak = static_cast<std::size_t>(peak_it - profile.begin());
  const double threshold = level * *peak_it;
  if (!(*peak_it > 0.0)) return std::nullopt;

  std::size_t lo = peak;
  while (lo > 0 && profile[lo - 1] >= threshold) --lo;
  std::size_t hi = peak;
  while (hi + 1 < profile.size() && profile[hi + 1] >= threshold) ++hi;
  if (lo == 0 || hi + 1 == profile.size()) return std::nullopt;

  // Crossing positions between the last sample above and the first below the threshold.
  const double left = static_cast<double>(lo) -
                      (profile[lo] - threshold) / (profile[lo] - profile[lo - 1]);
  const double right = static_cast<double>(hi) +
                       (profile[hi] - threshold) / (profile[hi] - profile[hi + 1]);
  return (right - left) * spacing;
}

ResolutionCell measure_resolution(const ComplexVolume& h) {
  const auto [pi, pj, pk] = h.grid().unravel(argmax_abs(h));
  const Dims d = h.dims();
  const double half = 0.5;  // -6 dB in amplitude
  auto line = [&](int axis) {
    std::vector<double> p(d[axis]);
    for (std::size_t n = 0; n < p.size(); ++n) {
      p[n] = std::abs(axis == 0 ? h(n, pj, pk) : axis == 1 ? h(pi, n, pk) : h(pi, pj, n));
    }
    return p;
  };
  auto width = [&](int axis) {
    const auto w = width_at_level(line(axis), h.grid().spacing[axis], half);
    if (!w) {
      throw Refusal("measure_resolution: -6 dB contour along axis " + std::to_string(axis) +
                    " leaves the grid");
    }
    return *w;
  };
  return {width(0), width(1), width(2)};
}

}  // namespace vatk
