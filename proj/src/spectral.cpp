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

#include "vatk/spectral.hpp"

namespace vatk {

std::vector<Complex> embed_kernel(const ComplexVolume& kernel, Dims dims, std::size_t anchor) {
  const Dims kd = kernel.dims();
  if (kd.nx > dims.nx || kd.ny > dims.ny || kd.nz > dims.nz) {
    throw Refusal("kernel (" + describe(kernel.grid()) + ") does not fit the transform grid");
  }
  const auto [ai, aj, ak] = kernel.grid().unravel(anchor);
  std::vector<Complex> out(dims.size());
  for (std::size_t k = 0; k < kd.nz; ++k) {
    const std::size_t tk = (k + dims.nz - ak) % dims.nz;
    for (std::size_t j = 0; j < kd.ny; ++j) {
      const std::size_t tj = (j + dims.ny - aj) % dims.ny;
      for (std::size_t i = 0; i < kd.nx; ++i) {
        const std::size_t ti = (i + dims.nx - ai) % dims.nx;
        out[ti + dims.nx * (tj + dims.ny * tk)] = kernel(i, j, k);
      }
    }
  }
  return out;
}

}  // namespace vatk
