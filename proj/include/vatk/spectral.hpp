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

#include "vatk/volume.hpp"

namespace vatk {

/// Copies `kernel` into a zero array of `dims`, circularly shifted so that voxel `anchor`
/// of the kernel lands on index (0, 0, 0). Kernel dims must not exceed `dims`.
std::vector<Complex> embed_kernel(const ComplexVolume& kernel, Dims dims, std::size_t anchor);

/// Signed DFT frequency index of bin `i` out of `n` (i for i <= n/2, i - n otherwise).
inline long signed_frequency(std::size_t i, std::size_t n) {
  const auto si = static_cast<long>(i);
  const auto sn = static_cast<long>(n);
  return si <= sn / 2 ? si : si - sn;
}

}  // namespace vatk
