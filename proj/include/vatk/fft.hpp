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

#include <complex>
#include <cstddef>
#include <span>

#include "vatk/volume.hpp"

namespace vatk {

enum class FftDirection { forward, inverse };

/// In-place unnormalised 3D DFT of x-fastest data. forward uses exp(-i...), inverse
/// exp(+i...); a forward/inverse pair scales by dims.size().
void fft3d(std::span<Complex> data, Dims dims, FftDirection direction);

/// In-place unnormalised 1D DFT.
void fft1d(std::span<Complex> data, FftDirection direction);

/// Smallest n' >= n whose prime factors are all in {2, 3, 5, 7}.
std::size_t next_fast_size(std::size_t n);

}  // namespace vatk
