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

#include <cmath>
#include <cstdint>
#include <random>

#include "vatk/fft.hpp"
#include "vatk/forward_model.hpp"
#include "vatk/spectral.hpp"
#include "vatk/volume.hpp"

namespace vatk::test {

inline Grid3D small_grid(Dims dims, double spacing = 1e-3) {
  Grid3D g;
  g.dims = dims;
  g.spacing = {spacing, spacing, spacing};
  return g;
}

inline RealVolume random_real(const Grid3D& grid, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  RealVolume v(grid);
  for (double& x : v.storage()) x = u(rng);
  return v;
}

inline ComplexVolume random_complex(const Grid3D& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexVolume v(grid);
  for (Complex& z : v.storage()) z = {n(rng), n(rng)};
  return v;
}

/// Direct O(N^2) linear convolution with h's anchor voxel mapped onto the output voxel, cropped
/// to f's grid: g[x] = sum_y f[y] h[x - y + anchor].
inline ComplexVolume brute_force_convolution(const ComplexVolume& f, const ComplexVolume& h, std::size_t anchor) {
  const auto a = h.grid().unravel(anchor);
  ComplexVolume g(f.grid());
  const Dims fd = f.dims();
  const Dims hd = h.dims();
  for (std::size_t k = 0; k < fd.nz; ++k)
    for (std::size_t j = 0; j < fd.ny; ++j)
      for (std::size_t i = 0; i < fd.nx; ++i) {
        Complex acc{};
        for (std::size_t kk = 0; kk < fd.nz; ++kk)
          for (std::size_t jj = 0; jj < fd.ny; ++jj)
            for (std::size_t ii = 0; ii < fd.nx; ++ii) {
              const long hi = static_cast<long>(i) - static_cast<long>(ii) + static_cast<long>(a[0]);
              const long hj = static_cast<long>(j) - static_cast<long>(jj) + static_cast<long>(a[1]);
              const long hk = static_cast<long>(k) - static_cast<long>(kk) + static_cast<long>(a[2]);
              if (hi < 0 || hj < 0 || hk < 0 || hi >= static_cast<long>(hd.nx) || hj >= static_cast<long>(hd.ny) ||
                  hk >= static_cast<long>(hd.nz))
                continue;
              acc += f(ii, jj, kk) * h(static_cast<std::size_t>(hi), static_cast<std::size_t>(hj),
                                       static_cast<std::size_t>(hk));
            }
        g(i, j, k) = acc;
      }
  return g;
}

// Gaussian blur with a mild phase twist; its spectrum stays well away from zero.
inline ComplexVolume gentle_kernel(double sigma = 0.7) {
  ComplexVolume h(small_grid({5, 5, 5}));
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t j = 0; j < 5; ++j)
      for (std::size_t i = 0; i < 5; ++i) {
        const double r2 = std::pow(i - 2.0, 2) + std::pow(j - 2.0, 2) + std::pow(k - 2.0, 2);
        h(i, j, k) = std::polar(std::exp(-r2 / (2 * sigma * sigma)), 0.1 * (static_cast<double>(k) - 2.0));
      }
  return h;
}

// Phantom whose blurred support stays inside the image, so no information leaves the field.
inline RealVolume interior_phantom(const Grid3D& g, std::uint64_t seed) {
  auto f = random_real(g, seed);
  for (std::size_t k = 0; k < g.dims.nz; ++k)
    for (std::size_t j = 0; j < g.dims.ny; ++j)
      for (std::size_t i = 0; i < g.dims.nx; ++i) {
        const bool border = i < 3 || j < 3 || k < 3 || i + 3 >= g.dims.nx || j + 3 >= g.dims.ny || k + 3 >= g.dims.nz;
        if (border) f(i, j, k) = 0.0;
      }
  return f;
}

// Reference inverse filter on the padded transform grid, written out independently.
inline RealVolume inverse_filter(const ComplexVolume& g, const ComplexVolume& h) {
  const Dims t = linear_convolution_dims(g.dims(), h.dims());
  std::vector<Complex> G(t.size()), H = embed_kernel(h, t, argmax_abs(h));
  for (std::size_t k = 0; k < g.dims().nz; ++k)
    for (std::size_t j = 0; j < g.dims().ny; ++j)
      for (std::size_t i = 0; i < g.dims().nx; ++i) G[i + t.nx * (j + t.ny * k)] = g(i, j, k);
  fft3d(G, t, FftDirection::forward);
  fft3d(H, t, FftDirection::forward);
  for (std::size_t n = 0; n < G.size(); ++n) G[n] /= H[n];
  fft3d(G, t, FftDirection::inverse);
  RealVolume out(g.grid());
  for (std::size_t k = 0; k < g.dims().nz; ++k)
    for (std::size_t j = 0; j < g.dims().ny; ++j)
      for (std::size_t i = 0; i < g.dims().nx; ++i) {
        out(i, j, k) = G[i + t.nx * (j + t.ny * k)].real() / static_cast<double>(t.size());
      }
  return out;
}

}  // namespace vatk::test
