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

#include "vatk/restoration.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>

#include "vatk/fft.hpp"
#include "vatk/forward_model.hpp"
#include "vatk/parallel.hpp"
#include "vatk/spectral.hpp"

namespace vatk {

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::wiener: return "wiener";
    case FilterKind::cls: return "cls";
    case FilterKind::gm: return "gm";
  }
  return "unknown";
}

FilterKind parse_filter(const std::string& name) {
  if (name == "wiener") return FilterKind::wiener;
  if (name == "cls") return FilterKind::cls;
  if (name == "gm") return FilterKind::gm;
  throw ConfigError("unknown filter '" + name + "' (expected wiener, cls or gm)");
}

void FilterParams::validate() const {
  if (!std::isfinite(nsr) || nsr < 0.0) {
    throw Refusal("noise-to-signal ratio must be finite and >= 0, got " + std::to_string(nsr));
  }
  if (nsr_spectrum) {
    for (double q : nsr_spectrum->values()) {
      if (!std::isfinite(q) || q < 0.0) {
        throw Refusal("per-frequency noise-to-signal ratio must be finite and >= 0");
      }
    }
  }
  if (kind == FilterKind::cls && (!std::isfinite(gamma) || gamma < 0.0)) {
    throw Refusal("cls: gamma must be finite and >= 0, got " + std::to_string(gamma));
  }
  if (kind == FilterKind::gm) {
    if (!std::isfinite(gamma) || gamma <= 0.0) {
      throw Refusal("gm: gamma must be finite and > 0, got " + std::to_string(gamma));
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw Refusal("gm: alpha must lie in [0, 1], got " + std::to_string(alpha));
    }
  }
}

double default_nsr(double snr_db) {
  if (std::isnan(snr_db)) throw Refusal("default_nsr: snr_db is NaN");
  return std::pow(10.0, -snr_db / 10.0);
}

std::vector<double> laplacian_power_spectrum(Dims dims) {
  // Transform of the stencil: -6 + 2 cos(wx) + 2 cos(wy) + 2 cos(wz). Axes of length 1
  // wrap the neighbours onto the centre and contribute 2 cos(0) = 2.
  auto axis_terms = [](std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
    return t;
  };
  const auto tx = axis_terms(dims.nx);
  const auto ty = axis_terms(dims.ny);
  const auto tz = axis_terms(dims.nz);
  std::vector<double> out(dims.size());
  std::size_t n = 0;
  for (std::size_t k = 0; k < dims.nz; ++k) {
    for (std::size_t j = 0; j < dims.ny; ++j) {
      for (std::size_t i = 0; i < dims.nx; ++i, ++n) {
        const double p = -6.0 + tx[i] + ty[j] + tz[k];
        out[n] = p * p;
      }
    }
  }
  return out;
}

Deconvolver::Deconvolver(const ComplexVolume& kernel, const Grid3D& image_grid) : grid_(image_grid) {
  grid_.validate();
  require_same_spacing(kernel.grid(), grid_, "deconvolution kernel vs image");
  if (!all_finite(kernel)) throw Refusal("deconvolution kernel has non-finite values");
  transform_ = linear_convolution_dims(grid_.dims, kernel.dims());
  transfer_ = embed_kernel(kernel, transform_, argmax_abs(kernel));
  for (Complex c : transfer_) energy_ += std::norm(c);
  if (!(energy_ > 0.0)) throw Refusal("deconvolution kernel is identically zero");
  fft3d(transfer_, transform_, FftDirection::forward);
}

std::vector<Complex> Deconvolver::image_spectrum(const ComplexVolume& g) const {
  if (g.dims() != grid_.dims) {
    throw Refusal("image grid (" + describe(g.grid()) + ") differs from the deconvolver grid (" +
                  describe(grid_) + ")");
  }
  require_same_spacing(g.grid(), grid_, "image vs deconvolver");
  std::vector<Complex> spectrum(transform_.size());
  const Dims d = grid_.dims;
  for (std::size_t k = 0; k < d.nz; ++k) {
    for (std::size_t j = 0; j < d.ny; ++j) {
      const Complex* src = &g(0, j, k);
      std::copy(src, src + d.nx, spectrum.begin() + static_cast<std::ptrdiff_t>(transform_.nx * (j + transform_.ny * k)));
    }
  }
  fft3d(spectrum, transform_, FftDirection::forward);
  return spectrum;
}

namespace {

Complex guarded(Complex numerator, double denominator, std::size_t& guards) {
  if (denominator == 0.0) {
    ++guards;
    return {};
  }
  const Complex gain = numerator / denominator;
  if (!std::isfinite(gain.real()) || !std::isfinite(gain.imag())) {
    ++guards;
    return {};
  }
  return gain;
}

}  // namespace

RestorationResult Deconvolver::apply(const ComplexVolume& g, const FilterParams& params) const {
  params.validate();
  if (params.nsr_spectrum && params.nsr_spectrum->dims() != transform_) {
    throw Refusal("per-frequency noise-to-signal volume must have the transform dims");
  }
  auto spectrum = image_spectrum(g);
  std::vector<double> laplacian;
  if (params.kind == FilterKind::cls) laplacian = laplacian_power_spectrum(transform_);

  const double energy = energy_;
  const std::span<const double> nsr_bins =
      params.nsr_spectrum ? params.nsr_spectrum->values() : std::span<const double>{};
  auto noise_term = [&](std::size_t n) {
    return nsr_bins.empty() ? energy * params.nsr : energy * nsr_bins[n];
  };

  std::atomic<std::size_t> guard_total{0};
  parallel_for(spectrum.size(), [&](std::size_t begin, std::size_t end) {
    std::size_t guards = 0;
    for (std::size_t n = begin; n < end; ++n) {
      const Complex h = transfer_[n];
      const Complex hc = std::conj(h);
      const double power = std::norm(h);
      Complex gain;
      switch (params.kind) {
        case FilterKind::wiener:
          gain = guarded(hc, power + noise_term(n), guards);
          break;
        case FilterKind::cls:
          gain = guarded(hc, power + params.gamma * energy * laplacian[n], guards);
          break;
        case FilterKind::gm: {
          const double regularised = power + params.gamma * noise_term(n);
          if (params.alpha == 0.0) {
            gain = guarded(hc, regularised, guards);
          } else if (params.alpha == 1.0) {
            gain = guarded(hc, power, guards);
          } else if (power == 0.0) {
            ++guards;
            gain = {};
          } else {
            const Complex inverse = hc / power;
            const Complex parametric = hc / regularised;
            gain = std::exp(params.alpha * std::log(inverse) +
                            (1.0 - params.alpha) * std::log(parametric));
            if (!std::isfinite(gain.real()) || !std::isfinite(gain.imag())) {
              ++guards;
              gain = {};
            }
          }
          break;
        }
      }
      spectrum[n] *= gain;
    }
    guard_total += guards;
  });

  fft3d(spectrum, transform_, FftDirection::inverse);
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  RestorationResult result{RealVolume(g.grid()), 0.0, guard_total.load()};
  double re2 = 0.0;
  double im2 = 0.0;
  const Dims d = grid_.dims;
  for (std::size_t k = 0; k < d.nz; ++k) {
    for (std::size_t j = 0; j < d.ny; ++j) {
      for (std::size_t i = 0; i < d.nx; ++i) {
        const Complex v = spectrum[i + transform_.nx * (j + transform_.ny * k)] * scale;
        result.restored_real(i, j, k) = v.real();
        re2 += v.real() * v.real();
        im2 += v.imag() * v.imag();
      }
    }
  }
  if (re2 > 0.0) {
    result.imag_residual_norm = std::sqrt(im2 / re2);
  } else {
    result.imag_residual_norm = im2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return result;
}

RestorationResult restore(const ComplexVolume& g, const ComplexVolume& h, const FilterParams& params) {
  return Deconvolver(h, g.grid()).apply(g, params);
}

RestorationResult wiener(const ComplexVolume& g, const ComplexVolume& h, double nsr) {
  FilterParams p;
  p.kind = FilterKind::wiener;
  p.nsr = nsr;
  return restore(g, h, p);
}

RestorationResult cls(const ComplexVolume& g, const ComplexVolume& h, double gamma) {
  FilterParams p;
  p.kind = FilterKind::cls;
  p.gamma = gamma;
  return restore(g, h, p);
}

RestorationResult gm(const ComplexVolume& g, const ComplexVolume& h, double alpha, double gamma,
                     double nsr) {
  FilterParams p;
  p.kind = FilterKind::gm;
  p.alpha = alpha;
  p.gamma = gamma;
  p.nsr = nsr;
  return restore(g, h, p);
}

SweepResult parameter_sweep(const Deconvolver& deconvolver, const ComplexVolume& g, FilterKind kind,
                            const std::vector<double>& gammas, const std::vector<double>& alphas,
                            const std::vector<double>& nsrs,
                            const std::function<double(const RealVolume&)>& score) {
  const std::vector<double> unused{0.0};
  const bool uses_gamma = kind != FilterKind::wiener;
  const bool uses_alpha = kind == FilterKind::gm;
  const bool uses_nsr = kind != FilterKind::cls;
  const auto& gamma_list = uses_gamma ? gammas : unused;
  const auto& alpha_list = uses_alpha ? alphas : unused;
  const auto& nsr_list = uses_nsr ? nsrs : unused;
  if (gamma_list.empty() || alpha_list.empty() || nsr_list.empty()) {
    throw Refusal("parameter_sweep: an applicable parameter list is empty");
  }

  SweepResult result;
  for (double gamma : gamma_list) {
    for (double alpha : alpha_list) {
      for (double nsr : nsr_list) {
        FilterParams p;
        p.kind = kind;
        if (uses_gamma) p.gamma = gamma;
        if (uses_alpha) p.alpha = alpha;
        if (uses_nsr) p.nsr = nsr;
        const double s = score(deconvolver.apply(g, p).restored_real);
        if (result.entries.empty() || s > result.entries[result.best].score) {
          result.best = result.entries.size();
        }
        result.entries.push_back({p, s});
      }
    }
  }
  return result;
}

}  // namespace vatk
