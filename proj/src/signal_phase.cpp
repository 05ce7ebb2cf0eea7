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

#include "vatk/signal_phase.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "vatk/fft.hpp"
#include "vatk/parallel.hpp"
#include "vatk/spectral.hpp"

namespace vatk {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

void check_timing(std::size_t length, double sample_rate, double diff_freq) {
  if (!(sample_rate > 0.0) || !(diff_freq > 0.0)) {
    throw Refusal("sequence sample rate and difference frequency must be > 0");
  }
  if (!(sample_rate > 2.0 * diff_freq)) {
    throw Refusal("sequence sample rate must exceed twice the difference frequency");
  }
  const double periods = static_cast<double>(length) * diff_freq / sample_rate;
  if (length < 4 || periods < 2.0) {
    throw Refusal("sequence must span at least 2 periods of the difference frequency and 4 samples");
  }
}

double relative_phase(std::span<const Complex> zi, std::span<const Complex> zj) {
  Complex total;
  for (std::size_t n = 0; n < zi.size(); ++n) total += zj[n] * std::conj(zi[n]);
  const double centre = std::arg(total);
  const Complex rotate = std::polar(1.0, -centre);
  double sum = 0.0;
  for (std::size_t n = 0; n < zi.size(); ++n) sum += std::arg(zj[n] * std::conj(zi[n]) * rotate);
  return wrap_phase(centre + sum / static_cast<double>(zi.size()));
}

}  // namespace

void PixelSequence::validate() const {
  check_timing(samples.size(), sample_rate, diff_freq);
  for (double s : samples) {
    if (!std::isfinite(s)) throw Refusal("sequence holds a non-finite sample");
  }
}

std::vector<double> hilbert(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) throw Refusal("hilbert: sequence needs at least 4 samples");
  std::vector<Complex> spectrum(x.begin(), x.end());
  fft1d(spectrum, FftDirection::forward);
  for (std::size_t k = 0; k < n; ++k) {
    const long f = signed_frequency(k, n);
    if (f == 0 || (n % 2 == 0 && k == n / 2)) {
      spectrum[k] = 0.0;
    } else {
      spectrum[k] *= f > 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
    }
  }
  fft1d(spectrum, FftDirection::inverse);
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = spectrum[k].real() * scale;
  return out;
}

std::vector<Complex> analytic_signal(std::span<const double> x) {
  const auto q = hilbert(x);
  std::vector<Complex> z(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) z[n] = Complex(x[n], q[n]);
  return z;
}

double tone_amplitude(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(2.0 * s / static_cast<double>(x.size()));
}

double relative_phase(const PixelSequence& xi, const PixelSequence& xj) {
  xi.validate();
  xj.validate();
  if (xi.samples.size() != xj.samples.size() || xi.sample_rate != xj.sample_rate ||
      xi.diff_freq != xj.diff_freq) {
    throw Refusal("relative_phase: sequences differ in length, sample rate or difference frequency");
  }
  if (tone_amplitude(xi.samples) == 0.0 || tone_amplitude(xj.samples) == 0.0) {
    throw Refusal("relative_phase: zero-amplitude sequence has no phase");
  }
  const auto zi = analytic_signal(xi.samples);
  const auto zj = analytic_signal(xj.samples);
  return relative_phase(std::span<const Complex>(zi), std::span<const Complex>(zj));
}

void SequenceSet::validate() const {
  grid.validate();
  check_timing(length, sample_rate, diff_freq);
  if (samples.size() != grid.size() * length) {
    throw Refusal("sequence set holds " + std::to_string(samples.size()) + " samples, expected " +
                  std::to_string(grid.size() * length));
  }
}

PixelSequence SequenceSet::sequence(std::size_t p) const {
  const auto s = pixel(p);
  return {std::vector<double>(s.begin(), s.end()), sample_rate, diff_freq};
}

PhaseMap build_phase_map(const SequenceSet& set, std::size_t reference_pixel) {
  set.validate();
  if (reference_pixel >= set.grid.size()) {
    throw Refusal("reference pixel " + std::to_string(reference_pixel) + " lies outside the grid");
  }
  const auto ref_samples = set.pixel(reference_pixel);
  if (tone_amplitude(ref_samples) == 0.0) {
    throw Refusal("reference pixel " + std::to_string(reference_pixel) + " has zero amplitude");
  }
  const auto zref = analytic_signal(ref_samples);

  PhaseMap map{reference_pixel, RealVolume(set.grid), RealVolume(set.grid), RealVolume(set.grid)};
  parallel_for(set.grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto x = set.pixel(p);
      const double amplitude = tone_amplitude(x);
      map.amplitudes[p] = amplitude;
      if (amplitude == 0.0) {
        map.mask[p] = 1.0;
        continue;
      }
      const auto z = analytic_signal(x);
      map.phases[p] = relative_phase(std::span<const Complex>(zref), std::span<const Complex>(z));
    }
  });
  map.phases[reference_pixel] = 0.0;
  return map;
}

SequenceSet synthesize_sequences(const ComplexVolume& image, double sample_rate, double diff_freq,
                                 std::size_t length, const std::optional<SequenceNoise>& noise) {
  SequenceSet set{image.grid(), length, sample_rate, diff_freq, {}};
  check_timing(length, sample_rate, diff_freq);
  set.samples.resize(image.size() * length);
  const double step = 2.0 * kPi * diff_freq / sample_rate;
  for (std::size_t p = 0; p < image.size(); ++p) {
    const double a = std::abs(image[p]);
    const double phi = std::arg(image[p]);
    double* out = &set.samples[p * length];
    for (std::size_t n = 0; n < length; ++n) out[n] = a * std::cos(step * static_cast<double>(n) + phi);
  }
  if (noise) {
    if (!std::isfinite(noise->snr_db)) throw Refusal("sequence noise SNR must be finite");
    double power = 0.0;
    for (Complex v : image.values()) power += 0.5 * std::norm(v);
    power /= static_cast<double>(image.size());
    if (!(power > 0.0)) throw Refusal("sequence noise: image is identically zero");
    const double sigma = std::sqrt(power / std::pow(10.0, noise->snr_db / 10.0));
    std::mt19937_64 rng(noise->seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (double& s : set.samples) s += gauss(rng);
  }
  return set;
}

ComplexVolume phase_map_image(const PhaseMap& map) {
  ComplexVolume out(map.phases.grid());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = std::polar(map.amplitudes[p], map.phases[p]);
  return out;
}

ComplexVolume gaussian_lowpass(const ComplexVolume& image, double cutoff) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw Refusal("low-pass cutoff must be finite and > 0");
  const Grid3D& g = image.grid();
  std::vector<Complex> spectrum(image.values().begin(), image.values().end());
  fft3d(spectrum, g.dims, FftDirection::forward);
  std::array<std::vector<double>, 3> nu2;
  for (int a = 0; a < 3; ++a) {
    const std::size_t n = g.dims[a];
    nu2[a].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double nu = static_cast<double>(signed_frequency(i, n)) /
                        (static_cast<double>(n) * g.spacing[a] * cutoff);
      nu2[a][i] = nu * nu;
    }
  }
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  std::size_t n = 0;
  for (std::size_t k = 0; k < g.dims.nz; ++k) {
    for (std::size_t j = 0; j < g.dims.ny; ++j) {
      for (std::size_t i = 0; i < g.dims.nx; ++i, ++n) {
        spectrum[n] *= scale * std::exp(-std::numbers::ln2 * (nu2[0][i] + nu2[1][j] + nu2[2][k]));
      }
    }
  }
  fft3d(spectrum, g.dims, FftDirection::inverse);
  return ComplexVolume(g, std::move(spectrum));
}

ComplexVolume spectral_inversion(const ComplexVolume& image, double cutoff) {
  const ComplexVolume low = gaussian_lowpass(image, cutoff);
  ComplexVolume high = image;
  for (std::size_t n = 0; n < high.size(); ++n) high[n] -= low[n];
  return high;
}

ComplexVolume estimate_lsf(const ComplexVolume& image, const IndexBox& region, double cutoff) {
  const Dims d = image.dims();
  if (region.empty()) throw Refusal("estimate_lsf: wire region is empty");
  for (int a = 0; a < 3; ++a) {
    if (region.hi[a] > d[a]) throw Refusal("estimate_lsf: wire region extends past the image");
  }
  const ComplexVolume high = spectral_inversion(image, cutoff);

  std::size_t peak = 0;
  double peak_mag = -1.0;
  for (std::size_t k = region.lo[2]; k < region.hi[2]; ++k) {
    for (std::size_t j = region.lo[1]; j < region.hi[1]; ++j) {
      for (std::size_t i = region.lo[0]; i < region.hi[0]; ++i) {
        const std::size_t n = image.grid().index(i, j, k);
        const double m = std::abs(high[n]);
        if (m > peak_mag) {
          peak_mag = m;
          peak = n;
        }
      }
    }
  }
  if (!(peak_mag > 0.0)) throw Refusal("estimate_lsf: no response inside the wire region");

  const Dims out_dims = region.dims();
  const std::array<std::size_t, 3> centre{out_dims.nx / 2, out_dims.ny / 2, out_dims.nz / 2};
  const auto p = image.grid().unravel(peak);
  Grid3D out_grid = image.grid();
  out_grid.dims = out_dims;
  const Vec3 peak_pos = image.grid().position(p[0], p[1], p[2]);
  for (int a = 0; a < 3; ++a) {
    out_grid.origin[a] = peak_pos[a] - static_cast<double>(centre[a]) * out_grid.spacing[a];
  }
  ComplexVolume out(out_grid);
  const Complex norm = 1.0 / peak_mag;
  for (std::size_t k = 0; k < out_dims.nz; ++k) {
    for (std::size_t j = 0; j < out_dims.ny; ++j) {
      for (std::size_t i = 0; i < out_dims.nx; ++i) {
        const long si = static_cast<long>(p[0] + i) - static_cast<long>(centre[0]);
        const long sj = static_cast<long>(p[1] + j) - static_cast<long>(centre[1]);
        const long sk = static_cast<long>(p[2] + k) - static_cast<long>(centre[2]);
        if (si < 0 || sj < 0 || sk < 0) continue;
        const auto ui = static_cast<std::size_t>(si), uj = static_cast<std::size_t>(sj),
                   uk = static_cast<std::size_t>(sk);
        if (!region.contains(ui, uj, uk)) continue;
        const std::size_t n = image.grid().index(ui, uj, uk);
        out(i, j, k) = high[n] * norm;
      }
    }
  }
  return out;
}

double default_lsf_cutoff(double wire_diameter) {
  if (!(wire_diameter > 0.0)) throw Refusal("wire diameter must be > 0");
  return 1.0 / (10.0 * wire_diameter);
}

}  // namespace vatk
