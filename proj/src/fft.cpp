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

#include "vatk/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace vatk {

namespace {

// Planner calls are not thread-safe in FFTW; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw Refusal("FFTW failed to create a transform plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

int sign_of(FftDirection d) { return d == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD; }

}  // namespace

void fft3d(std::span<Complex> data, Dims dims, FftDirection direction) {
  if (data.size() != dims.size()) throw Refusal("fft3d: buffer size does not match dimensions");
  if (data.empty()) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan raw = nullptr;
  {
    // FFTW_ESTIMATE keeps plan selection (and therefore round-off) independent of timing.
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_3d(static_cast<int>(dims.nz), static_cast<int>(dims.ny),
                           static_cast<int>(dims.nx), buf, buf, sign_of(direction), FFTW_ESTIMATE);
  }
  Plan(raw).execute();
}

void fft1d(std::span<Complex> data, FftDirection direction) {
  if (data.empty()) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan raw = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign_of(direction),
                           FFTW_ESTIMATE);
  }
  Plan(raw).execute();
}

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace vatk
