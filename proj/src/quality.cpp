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

#include "vatk/quality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

namespace vatk {

double mse(const RealVolume& a, const RealVolume& b) {
  require_same_grid(a.grid(), b.grid(), "mse");
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double d = a[n] - b[n];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double isnr(const RealVolume& f, const RealVolume& g, const RealVolume& fhat) {
  require_same_grid(f.grid(), g.grid(), "isnr: reference vs degraded");
  require_same_grid(f.grid(), fhat.grid(), "isnr: reference vs restored");
  double before = 0.0;
  double after = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double d0 = f[n] - g[n];
    const double d1 = f[n] - fhat[n];
    before += d0 * d0;
    after += d1 * d1;
  }
  if (after == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(before / after);
}

namespace {

constexpr std::size_t kMoments = 5;  // a, b, aa, bb, ab
using Plane = std::array<std::vector<double>, kMoments>;

struct WindowShape {
  std::array<std::size_t, 3> extent{};
  std::array<std::size_t, 3> positions{};
};

WindowShape window_shape(const Dims& d, const UiqiOptions& options) {
  if (options.window < 2) throw Refusal("uiqi: window must span at least 2 voxels");
  WindowShape s;
  if (options.mode == UiqiMode::slice) {
    int normal = 2;
    if (options.slice_normal) {
      normal = static_cast<int>(*options.slice_normal);
    } else {
      for (int a = 0; a < 3; ++a) {
        if (d[a] == 1) {
          normal = a;
          break;
        }
      }
    }
    for (int a = 0; a < 3; ++a) s.extent[a] = a == normal ? 1 : options.window;
  } else {
    for (int a = 0; a < 3; ++a) s.extent[a] = std::min(options.window, d[a]);
  }
  for (int a = 0; a < 3; ++a) {
    s.positions[a] = d[a] >= s.extent[a] ? d[a] - s.extent[a] + 1 : 0;
  }
  return s;
}

// Window sums of one z plane. Direct summation keeps all-zero windows exactly zero.
Plane plane_sums(const RealVolume& a, const RealVolume& b, std::size_t k, const WindowShape& w) {
  const Dims d = a.dims();
  const std::size_t ex = w.extent[0], ey = w.extent[1];
  const std::size_t ox = w.positions[0], oy = w.positions[1];
  Plane rows;
  for (auto& r : rows) r.assign(ox * d.ny, 0.0);
  for (std::size_t j = 0; j < d.ny; ++j) {
    const double* pa = &a(0, j, k);
    const double* pb = &b(0, j, k);
    for (std::size_t i = 0; i < ox; ++i) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (std::size_t t = 0; t < ex; ++t) {
        const double va = pa[i + t], vb = pb[i + t];
        sa += va;
        sb += vb;
        saa += va * va;
        sbb += vb * vb;
        sab += va * vb;
      }
      const std::size_t n = i + ox * j;
      rows[0][n] = sa;
      rows[1][n] = sb;
      rows[2][n] = saa;
      rows[3][n] = sbb;
      rows[4][n] = sab;
    }
  }
  Plane out;
  for (std::size_t m = 0; m < kMoments; ++m) {
    out[m].assign(ox * oy, 0.0);
    for (std::size_t j = 0; j < oy; ++j) {
      for (std::size_t t = 0; t < ey; ++t) {
        const double* src = &rows[m][ox * (j + t)];
        double* dst = &out[m][ox * j];
        for (std::size_t i = 0; i < ox; ++i) dst[i] += src[i];
      }
    }
  }
  return out;
}

}  // namespace

UiqiResult uiqi_detail(const RealVolume& a, const RealVolume& b, const UiqiOptions& options) {
  require_same_grid(a.grid(), b.grid(), "uiqi");
  const WindowShape w = window_shape(a.dims(), options);
  const std::size_t plane_positions = w.positions[0] * w.positions[1];
  if (plane_positions == 0 || w.positions[2] == 0) {
    throw Refusal("uiqi: window larger than the image (" + describe(a.grid()) + ")");
  }
  const double count =
      static_cast<double>(w.extent[0]) * static_cast<double>(w.extent[1]) * static_cast<double>(w.extent[2]);

  UiqiResult result;
  double total = 0.0;
  std::deque<Plane> planes;
  std::size_t next_plane = 0;
  Plane window;
  for (std::size_t k0 = 0; k0 < w.positions[2]; ++k0) {
    while (next_plane < k0 + w.extent[2]) planes.push_back(plane_sums(a, b, next_plane++, w));
    while (planes.size() > w.extent[2]) planes.pop_front();

    for (std::size_t m = 0; m < kMoments; ++m) {
      window[m].assign(plane_positions, 0.0);
      for (const Plane& p : planes) {
        for (std::size_t n = 0; n < plane_positions; ++n) window[m][n] += p[m][n];
      }
    }
    for (std::size_t n = 0; n < plane_positions; ++n) {
      const double sa = window[0][n], sb = window[1][n];
      const double spread = count * (window[2][n] + window[3][n]) - sa * sa - sb * sb;
      const double level = sa * sa + sb * sb;
      const double denominator = spread * level;
      if (denominator == 0.0) {
        ++result.skipped;
        continue;
      }
      const double q = 4.0 * (count * window[4][n] - sa * sb) * sa * sb / denominator;
      // |Q| <= 1 holds exactly; clamp only absorbs rounding in near-constant windows.
      total += std::clamp(q, -1.0, 1.0);
      ++result.windows;
    }
  }
  if (result.windows == 0) {
    throw Refusal("uiqi: every window is degenerate (" + std::to_string(result.skipped) +
                  " windows with zero variance and mean)");
  }
  result.value = total / static_cast<double>(result.windows);
  return result;
}

double uiqi(const RealVolume& a, const RealVolume& b, const UiqiOptions& options) {
  return uiqi_detail(a, b, options).value;
}

std::string to_string(IntensityScale scale) {
  switch (scale) {
    case IntensityScale::none: return "none";
    case IntensityScale::clamp: return "clamp";
    case IntensityScale::peak: return "peak";
  }
  return "unknown";
}

IntensityScale parse_intensity_scale(const std::string& name) {
  if (name == "none") return IntensityScale::none;
  if (name == "clamp") return IntensityScale::clamp;
  if (name == "peak") return IntensityScale::peak;
  throw ConfigError("unknown intensity scale '" + name + "' (expected none, clamp or peak)");
}

RealVolume rescale_intensity(const RealVolume& v, IntensityScale scale) {
  RealVolume out = v;
  switch (scale) {
    case IntensityScale::none:
      break;
    case IntensityScale::clamp:
      for (double& x : out.values()) x = std::clamp(x, 0.0, 1.0);
      break;
    case IntensityScale::peak: {
      const double peak = v.size() ? v[argmax(v)] : 0.0;
      if (!(peak > 0.0)) throw Refusal("peak intensity scaling needs a positive maximum");
      for (double& x : out.values()) x = std::clamp(x / peak, 0.0, 1.0);
      break;
    }
  }
  return out;
}

RealVolume quantize(const RealVolume& v, unsigned levels) {
  if (levels == 0) throw Refusal("quantize: needs at least one level step");
  RealVolume out = v;
  const double steps = static_cast<double>(levels);
  for (double& x : out.values()) {
    if (x < 0.0 || x > 1.0) throw Refusal("quantize: values must lie in [0, 1]");
    x = std::round(x * steps) / steps;
  }
  return out;
}

RealVolume display_intensity(const RealVolume& restored, const MetricOptions& options) {
  RealVolume scaled = rescale_intensity(restored, options.scale);
  if (options.levels > 0) {
    if (options.scale == IntensityScale::none) {
      throw Refusal("quantized metrics need an intensity scale that maps onto [0, 1]");
    }
    scaled = quantize(scaled, options.levels);
  }
  return scaled;
}

QualityReport evaluate(const RealVolume& reference, const RealVolume& degraded,
                       const RealVolume& restored, const MetricOptions& options) {
  const RealVolume scaled = display_intensity(restored, options);
  return {isnr(reference, degraded, restored), mse(reference, scaled),
          uiqi(reference, scaled, options.uiqi)};
}

}  // namespace vatk
