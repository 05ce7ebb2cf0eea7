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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "vatk/fft.hpp"
#include "vatk/parallel.hpp"
#include "vatk/spectral.hpp"

using namespace vatk;
using vatk::test::random_complex;
using vatk::test::small_grid;

namespace {

std::vector<Complex> naive_dft3(const std::vector<Complex>& x, Dims d, int sign) {
  std::vector<Complex> out(x.size());
  const double tau = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < d.nz; ++k)
    for (std::size_t j = 0; j < d.ny; ++j)
      for (std::size_t i = 0; i < d.nx; ++i) {
        Complex acc{};
        for (std::size_t c = 0; c < d.nz; ++c)
          for (std::size_t b = 0; b < d.ny; ++b)
            for (std::size_t a = 0; a < d.nx; ++a) {
              const double phase = sign * tau *
                                   (static_cast<double>(i * a) / static_cast<double>(d.nx) +
                                    static_cast<double>(j * b) / static_cast<double>(d.ny) +
                                    static_cast<double>(k * c) / static_cast<double>(d.nz));
              acc += x[a + d.nx * (b + d.ny * c)] * std::polar(1.0, phase);
            }
        out[i + d.nx * (j + d.ny * k)] = acc;
      }
  return out;
}

}  // namespace

TEST_CASE("fft3d matches a direct DFT on an odd, mixed-radix shape") {
  const Dims d{5, 3, 6};
  auto v = random_complex(small_grid(d), 11);
  const auto expected = naive_dft3(v.storage(), d, -1);
  auto data = v.storage();
  fft3d(data, d, FftDirection::forward);
  double err = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) err = std::max(err, std::abs(data[n] - expected[n]));
  CHECK(err < 1e-10);
}

TEST_CASE("forward then inverse fft3d scales by the element count") {
  const Dims d{8, 4, 10};
  auto v = random_complex(small_grid(d), 3);
  auto data = v.storage();
  fft3d(data, d, FftDirection::forward);
  fft3d(data, d, FftDirection::inverse);
  for (std::size_t n = 0; n < data.size(); ++n) {
    CHECK(std::abs(data[n] / static_cast<double>(d.size()) - v[n]) < 1e-12);
  }
}

TEST_CASE("Parseval: sum |x|^2 = sum |X|^2 / N") {
  const Dims d{6, 7, 8};
  auto v = random_complex(small_grid(d), 5);
  auto data = v.storage();
  fft3d(data, d, FftDirection::forward);
  double ex = 0.0, eX = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    ex += std::norm(v[n]);
    eX += std::norm(data[n]);
  }
  CHECK(eX / static_cast<double>(d.size()) == doctest::Approx(ex).epsilon(1e-12));
}

TEST_CASE("fft1d matches the 3D transform of a line") {
  const Dims d{12, 1, 1};
  auto v = random_complex(small_grid(d), 9);
  auto a = v.storage();
  auto b = v.storage();
  fft1d(a, FftDirection::forward);
  fft3d(b, d, FftDirection::forward);
  for (std::size_t n = 0; n < a.size(); ++n) CHECK(std::abs(a[n] - b[n]) < 1e-12);
}

TEST_CASE("next_fast_size returns the smallest 7-smooth size") {
  CHECK(next_fast_size(1) == 1);
  CHECK(next_fast_size(11) == 12);
  CHECK(next_fast_size(13) == 14);
  CHECK(next_fast_size(127) == 128);
  CHECK(next_fast_size(191) == 192);
  CHECK(next_fast_size(383) == 384);
  for (std::size_t n = 1; n < 400; ++n) {
    const std::size_t m = next_fast_size(n);
    CHECK(m >= n);
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    CHECK(r == 1);
  }
}

TEST_CASE("embed_kernel places the anchor at the origin and wraps the rest") {
  ComplexVolume k(small_grid({3, 1, 1}));
  k[0] = 1.0;
  k[1] = 2.0;
  k[2] = 3.0;
  const auto e = embed_kernel(k, {5, 1, 1}, 1);
  CHECK(e[0] == Complex(2.0));
  CHECK(e[1] == Complex(3.0));
  CHECK(e[4] == Complex(1.0));
  CHECK(e[2] == Complex(0.0));
  CHECK_THROWS_AS(embed_kernel(k, {2, 1, 1}, 0), Refusal);
}

TEST_CASE("signed_frequency folds the upper half to negative indices") {
  CHECK(signed_frequency(0, 8) == 0);
  CHECK(signed_frequency(4, 8) == 4);
  CHECK(signed_frequency(5, 8) == -3);
  CHECK(signed_frequency(3, 7) == 3);
  CHECK(signed_frequency(4, 7) == -3);
}

TEST_CASE("grid validation and volume payload checks") {
  Grid3D g = small_grid({2, 2, 2});
  g.dims.nz = 0;
  CHECK_THROWS_AS(g.validate(), Refusal);
  g = small_grid({2, 2, 2});
  g.spacing.y = 0.0;
  CHECK_THROWS_AS(g.validate(), Refusal);
  CHECK_THROWS_AS(RealVolume(small_grid({2, 2, 2}), std::vector<double>(7)), Refusal);
}

TEST_CASE("crop moves the origin to the first voxel of the box") {
  Grid3D g = small_grid({4, 5, 6}, 0.5);
  g.origin = {1.0, 2.0, 3.0};
  RealVolume v(g);
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = static_cast<double>(n);
  IndexBox box{{1, 2, 3}, {3, 4, 6}};
  const auto c = crop(v, box);
  CHECK(c.dims() == Dims{2, 2, 3});
  CHECK(c.grid().origin == Vec3{1.5, 3.0, 4.5});
  CHECK(c(0, 0, 0) == v(1, 2, 3));
  CHECK(c(1, 1, 2) == v(2, 3, 5));
  CHECK_THROWS_AS(crop(v, IndexBox{{0, 0, 0}, {5, 1, 1}}), Refusal);
}

TEST_CASE("centred_box clips at the grid edges") {
  const Grid3D g = small_grid({10, 10, 10});
  const auto inside = centred_box(g, {5, 5, 5}, {4, 3, 1});
  CHECK(inside.lo == std::array<std::size_t, 3>{3, 4, 5});
  CHECK(inside.hi == std::array<std::size_t, 3>{7, 7, 6});
  const auto edge = centred_box(g, {0, 9, 5}, {4, 4, 4});
  CHECK(edge.lo[0] == 0);
  CHECK(edge.hi[0] == 2);
  CHECK(edge.hi[1] == 10);
}

TEST_CASE("argmax_abs resolves ties to the lowest index") {
  ComplexVolume v(small_grid({4, 1, 1}));
  v[1] = Complex(0, 2);
  v[3] = 2.0;
  CHECK(argmax_abs(v) == 1);
}

TEST_CASE("parallel_for visits every index once for any worker count") {
  for (unsigned workers : {1u, 2u, 3u, 8u}) {
    set_thread_count(workers);
    std::vector<int> hits(1001, 0);
    parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t n = b; n < e; ++n) ++hits[n];
    });
    for (int h : hits) CHECK(h == 1);
  }
  set_thread_count(0);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  set_thread_count(4);
  CHECK_THROWS_AS(parallel_for(100, [](std::size_t b, std::size_t) {
                    if (b > 0) throw Refusal("boom");
                  }),
                  Refusal);
  set_thread_count(0);
}
