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

// Acceptance suite: one PASS or FAIL line per criterion, with the measured quantities.
//
// Criteria listed in `known_unattainable` print FAIL when they miss their targets but do not
// change the exit status; README.md explains why each cannot be met. Any other failure
// exits nonzero.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "support.hpp"
#include "vatk/acoustic_field.hpp"
#include "vatk/forward_model.hpp"
#include "vatk/io.hpp"
#include "vatk/parallel.hpp"
#include "vatk/phantom.hpp"
#include "vatk/pipeline.hpp"
#include "vatk/psf.hpp"
#include "vatk/quality.hpp"
#include "vatk/restoration.hpp"
#include "vatk/signal_phase.hpp"

namespace {

using namespace vatk;
using Clock = std::chrono::steady_clock;
constexpr double mm = 1e-3;
constexpr double pi = std::numbers::pi;

const std::set<int> known_unattainable = {3, 8};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// 1. Filter reductions on 64^3 volumes.
Outcome filter_identities() {
  const auto start = Clock::now();
  const auto g = test::random_complex(test::small_grid({64, 64, 64}), 11);
  const auto h = test::gentle_kernel();
  const Deconvolver d(h, g.grid());
  const auto w = d.apply(g, {FilterKind::wiener, 1.0, 0.5, 0.01, {}});
  const auto m = d.apply(g, {FilterKind::gm, 1.0, 0.0, 0.01, {}});
  const bool identical = w.restored_real == m.restored_real;
  const auto reference = test::inverse_filter(g, h);
  const double gm_err = relative_l2(d.apply(g, {FilterKind::gm, 1.0, 1.0, 0.01, {}}).restored_real, reference);
  const double cls_err = relative_l2(d.apply(g, {FilterKind::cls, 0.0, 0.5, 0.0, {}}).restored_real, reference);
  const double elapsed = seconds_since(start);
  return {identical && gm_err < 1e-6 && cls_err < 1e-6 && elapsed < 10.0,
          format("GM(0,1)==Wiener bit-exact: %s; GM(1) rel L2 %.2e; CLS(0) rel L2 %.2e; %.1f s",
                 identical ? "yes" : "no", gm_err, cls_err, elapsed)};
}

// 2. Noiseless blur then inverse filtering with Gaussian-spectrum PSFs.
Outcome round_trip() {
  double worst = 0.0;
  for (double sigma : {0.6, 0.7, 0.8}) {
    const auto grid = test::small_grid({48, 40, 56});
    const auto f = test::interior_phantom(grid, 17);
    const auto h = test::gentle_kernel(sigma);
    const auto g = convolve(f, h);
    for (const auto& params : {FilterParams{FilterKind::wiener, 1.0, 0.5, 0.0, {}},
                               FilterParams{FilterKind::cls, 0.0, 0.5, 0.0, {}},
                               FilterParams{FilterKind::gm, 1.0, 1.0, 0.0, {}}}) {
      worst = std::max(worst, relative_l2(restore(g, h, params).restored_real, f));
    }
  }
  return {worst < 1e-6, format("worst rel L2 over 3 PSFs x 3 filters %.2e", worst)};
}

// 3. Filter ranking on the desk grid at 20 dB, averaged over 5 seeds.
Outcome filter_ranking() {
  const auto start = Clock::now();
  RunConfig base;
  const double focus = base.transducer.focal_distance;
  const Grid3D grid = desk_grid(focus);
  const auto psf = simulate_psf(base.transducer, base.medium, kernel_grid(grid, focus), base.field);
  const auto kernel = line_kernel(psf, grid);
  const Deconvolver deconvolver(kernel, grid);
  const double nsr = default_nsr(20.0);
  const std::vector<std::pair<const char*, FilterParams>> filters = {
      {"wiener", {FilterKind::wiener, 1.0, 0.5, nsr, {}}},
      {"cls", {FilterKind::cls, 0.2, 0.5, nsr, {}}},
      {"gm", {FilterKind::gm, 1.0, 0.5, nsr, {}}}};
  bool pass = true;
  std::string detail;
  std::vector<double> min_isnr(filters.size(), std::numeric_limits<double>::infinity());
  for (const char* name : {"phantom1", "phantom2"}) {
    const auto phantom = render_phantom(builtin_phantom(name, focus, grid));
    const auto clean = convolve(phantom, kernel);
    std::vector<double> uiqi_mean(filters.size(), 0.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto degraded = add_noise(clean, {20.0, seed});
      const auto degraded_real = real_part(degraded);
      for (std::size_t n = 0; n < filters.size(); ++n) {
        const auto r = deconvolver.apply(degraded, filters[n].second);
        const auto q = evaluate(phantom, degraded_real, r.restored_real, base.metrics);
        uiqi_mean[n] += q.uiqi / 5.0;
        min_isnr[n] = std::min(min_isnr[n], q.isnr_db);
      }
    }
    const bool ranked = uiqi_mean[0] > uiqi_mean[1] && uiqi_mean[0] > uiqi_mean[2];
    pass = pass && ranked && uiqi_mean[0] >= 0.80;
    detail += format("%s UIQI wiener %.4f cls %.4f gm %.4f; ", name, uiqi_mean[0], uiqi_mean[1], uiqi_mean[2]);
  }
  for (double isnr : min_isnr) pass = pass && isnr >= 40.0;
  return {pass, detail + format("min ISNR wiener %.2f cls %.2f gm %.2f dB; %.0f s", min_isnr[0], min_isnr[1], min_isnr[2],
                                seconds_since(start))};
}

// 4. Resolution cell and symmetry of the simulated PSF.
Outcome psf_geometry() {
  const TransducerSpec spec;
  const Medium medium;
  const double focus = spec.focal_distance;
  const auto psf = simulate_psf(spec, medium, focal_grid({64, 64, 160}, {0.1 * mm, 0.1 * mm, 0.25 * mm}, focus));
  const auto cell = measure_resolution(psf.volume);
  const bool lateral = std::abs(cell.width_x / (0.8 * mm) - 1.0) <= 0.25 && std::abs(cell.width_y / (0.8 * mm) - 1.0) <= 0.25;
  const bool axial = std::abs(cell.extent_z / (16 * mm) - 1.0) <= 0.25;
  // |h| at matching radii on the x and y axes of every depth plane.
  double asymmetry = 0.0;
  const auto& h = psf.volume;
  const double peak = std::abs(h[argmax_abs(h)]);
  for (std::size_t k = 0; k < h.dims().nz; ++k)
    for (std::size_t d = 1; d < 20; ++d) {
      const double a = std::abs(h(32 + d, 32, k));
      for (double b : {std::abs(h(32 - d, 32, k)), std::abs(h(32, 32 + d, k)), std::abs(h(32, 32 - d, k))}) {
        asymmetry = std::max(asymmetry, std::abs(a - b) / peak);
      }
    }
  return {lateral && axial && asymmetry < 0.01,
          format("-6 dB widths x %.3f mm, y %.3f mm, axial %.2f mm; max asymmetry %.1e of peak",
                 cell.width_x / mm, cell.width_y / mm, cell.extent_z / mm, asymmetry)};
}

// On-axis pressure of a uniformly vibrating spherical cap of aperture radius a (rho c u0 = 1).
Complex focused_cap(double a, double R, double k, double z) {
  const double h = R - std::sqrt(R * R - a * a);
  const double edge = std::sqrt((z - h) * (z - h) + a * a);
  if (std::abs(z - R) < 1e-12) return Complex(0.0, k * h) * std::exp(Complex(0.0, k * R));
  return 1.0 / (1.0 - z / R) * (std::exp(Complex(0.0, k * edge)) - std::exp(Complex(0.0, k * z)));
}

// 5. On-axis field against the closed form at 50 depths.
Outcome field_oracle() {
  const TransducerSpec s;
  const Medium m;
  const double rhoc = m.density * m.sound_speed;
  Grid3D axis;
  axis.dims = {1, 1, 50};
  axis.spacing = {0.1 * mm, 0.1 * mm, 34.0 * mm / 49.0};
  axis.origin = {0, 0, 58 * mm};
  double worst = 0.0;
  for (Element e : {Element::inner, Element::outer}) {
    const auto p = compute_pressure_field(s, e, m, axis);
    const double k = wavenumber(s, e, m);
    for (std::size_t n = 0; n < 50; ++n) {
      const double z = axis.position(0, 0, n).z;
      Complex expected = e == Element::inner
                             ? focused_cap(s.inner_radius, s.focal_distance, k, z)
                             : focused_cap(s.ring_outer_radius, s.focal_distance, k, z) -
                                   focused_cap(s.ring_inner_radius, s.focal_distance, k, z);
      expected *= rhoc;
      worst = std::max(worst, std::abs(std::abs(p[n]) / std::abs(expected) - 1.0));
    }
  }
  return {worst < 0.01, format("worst relative magnitude error %.2e over 50 depths in [58, 92] mm, both elements", worst)};
}

std::vector<double> tone(std::size_t n, double cycles, double phase, bool sine = false) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double arg = 2 * pi * cycles * static_cast<double>(t) / static_cast<double>(n) + phase;
    x[t] = sine ? std::sin(arg) : std::cos(arg);
  }
  return x;
}

PixelSequence pixel(std::vector<double> samples) {
  PixelSequence s;
  s.samples = std::move(samples);
  return s;
}

// 6. Phase recovery.
Outcome phase_recovery() {
  const std::size_t n = 200;  // 10 difference-frequency periods at 1 MHz sampling
  double hilbert_err = 0.0;
  const auto h = hilbert(tone(n, 10.0, 0.4));
  const auto s = tone(n, 10.0, 0.4, true);
  for (std::size_t t = 0; t < n; ++t) hilbert_err = std::max(hilbert_err, std::abs(h[t] - s[t]));

  double noiseless = 0.0;
  for (double offset = -pi + 0.05; offset < pi; offset += 0.25) {
    const double est = relative_phase(pixel(tone(n, 10.0, 0.2)), pixel(tone(n, 10.0, 0.2 + offset)));
    noiseless = std::max(noiseless, std::abs(std::remainder(est - offset, 2 * pi)));
  }

  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> uniform(-pi, pi);
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5 / 100.0));
  double sum_sq = 0.0;
  for (int p = 0; p < 1000; ++p) {
    const double a = uniform(rng), b = uniform(rng);
    auto xi = tone(n, 10.0, a);
    auto xj = tone(n, 10.0, b);
    for (auto& v : xi) v += noise(rng);
    for (auto& v : xj) v += noise(rng);
    const double err = std::remainder(relative_phase(pixel(xi), pixel(xj)) - (b - a), 2 * pi);
    sum_sq += err * err;
  }
  const double rms = std::sqrt(sum_sq / 1000.0);
  return {hilbert_err < 1e-10 && noiseless < 1e-6 && rms < 0.05,
          format("Hilbert max error %.1e; noiseless max error %.1e rad; 20 dB RMS %.4f rad over 1000 pixels",
                 hilbert_err, noiseless, rms)};
}

// 7. Metric properties.
Outcome metric_properties() {
  bool pass = true;
  double worst_self = 0.0, largest = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = test::small_grid({16, 16, 8});
    const auto a = test::random_real(g, 2 * seed, -1.0, 1.0);
    const auto b = test::random_real(g, 2 * seed + 1, -1.0, 1.0);
    for (UiqiMode mode : {UiqiMode::slice, UiqiMode::volume}) {
      UiqiOptions o;
      o.mode = mode;
      worst_self = std::max(worst_self, std::abs(uiqi(a, a, o) - 1.0));
      largest = std::max(largest, std::abs(uiqi(a, b, o)));
    }
    pass = pass && mse(a, a) == 0.0 && isnr(a, b, b) == 0.0 && std::isinf(isnr(a, b, a));
  }
  pass = pass && worst_self < 1e-12 && largest <= 1.0;
  return {pass, format("max |UIQI(x,x)-1| %.1e; max |UIQI| %.3f over 100 pairs; MSE/ISNR identities %s",
                       worst_self, largest, pass ? "hold" : "broken")};
}

// Intensity-weighted centroid of the positive restored values in a 7x7 window around the
// strongest voxel near the wire.
std::array<double, 2> wire_centroid(const RealVolume& r, double ti, double tk) {
  const long nx = static_cast<long>(r.dims().nx), nz = static_cast<long>(r.dims().nz);
  long bi = 0, bk = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (long k = std::lround(tk) - 15; k <= std::lround(tk) + 15; ++k)
    for (long i = std::lround(ti) - 8; i <= std::lround(ti) + 8; ++i) {
      if (i < 0 || k < 0 || i >= nx || k >= nz) continue;
      if (r(i, 0, k) > best) {
        best = r(i, 0, k);
        bi = i;
        bk = k;
      }
    }
  double sw = 0, sx = 0, sz = 0;
  for (long k = bk - 3; k <= bk + 3; ++k)
    for (long i = bi - 3; i <= bi + 3; ++i) {
      if (i < 0 || k < 0 || i >= nx || k >= nz) continue;
      const double v = std::max(0.0, r(i, 0, k));
      sw += v;
      sx += v * static_cast<double>(i);
      sz += v * static_cast<double>(k);
    }
  return {sx / sw, sz / sw};
}

// 8. Wire image -> phase map -> estimated LSF -> CLS restoration, against the composed LSF.
Outcome lsf_pathway() {
  const auto start = Clock::now();
  const TransducerSpec spec;
  const Medium medium;
  const double focus = spec.focal_distance;
  const double pitch = 0.2 * mm;
  const Grid3D grid = wire_scan_grid(focus, pitch);
  const auto wires = builtin_phantom("wire3", focus, grid);
  const auto phantom = render_phantom(wires);
  const auto psf = simulate_psf(spec, medium, kernel_grid(grid, focus));
  const auto kernel = line_kernel(psf, grid);
  auto central = wires;
  central.wires = {wires.wires[1]};
  const auto theoretical = make_theoretical_lsf(psf, render_phantom(central));

  const auto clean = convolve(phantom, kernel);
  const double peak = std::abs(clean[argmax_abs(clean)]);
  // Slowly varying background, well below the spectral-inversion cutoff.
  auto scene = clean;
  for (std::size_t k = 0; k < grid.dims.nz; ++k)
    for (std::size_t i = 0; i < grid.dims.nx; ++i) {
      const Vec3 r = grid.position(i, 0, k);
      const double u = r.x / (15 * mm), v = (r.z - focus) / (30 * mm);
      scene(i, 0, k) += 0.2 * peak * std::exp(-(u * u + v * v));
    }
  const auto wire_index = [&](const WireSpec& w) {
    return std::array<double, 2>{(w.axis_point.x - grid.origin.x) / pitch, (w.axis_point.z - grid.origin.z) / pitch};
  };
  const auto centre = wire_index(wires.wires[1]);
  const IndexBox region = centred_box(
      grid, {static_cast<std::size_t>(std::lround(centre[0])), 0, static_cast<std::size_t>(std::lround(centre[1]))},
      {static_cast<std::size_t>(std::lround(5 * mm / pitch)), 1, static_cast<std::size_t>(std::lround(20 * mm / pitch))});
  const double cutoff = default_lsf_cutoff(wires.wires[1].diameter);

  MetricOptions display;
  display.scale = IntensityScale::peak;
  double worst_offset = 0.0, uiqi_estimated = 0.0, uiqi_composed = 0.0;
  const int seeds = 3;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto sequences = synthesize_sequences(scene, 1.0e6, 50.0e3, 200, SequenceNoise{20.0, static_cast<std::uint64_t>(seed)});
    const auto image = phase_map_image(build_phase_map(sequences, argmax_abs(scene)));
    const auto estimated = estimate_lsf(image, region, cutoff);
    const auto composed = compose_lsf(align_to_peak(theoretical, estimated), estimated);

    // The LSF was isolated by spectral inversion, so the image it restores carries the same filter.
    const auto inverted = spectral_inversion(image, cutoff);
    const auto from_estimate = cls(inverted, estimated, 0.01).restored_real;
    const auto from_composed = cls(inverted, composed, 0.01).restored_real;
    for (const auto& w : wires.wires) {
      const auto truth = wire_index(w);
      const auto c = wire_centroid(from_estimate, truth[0], truth[1]);
      worst_offset = std::max({worst_offset, std::abs(c[0] - truth[0]), std::abs(c[1] - truth[1])});
    }
    uiqi_estimated += uiqi(phantom, display_intensity(from_estimate, display)) / seeds;
    uiqi_composed += uiqi(phantom, display_intensity(from_composed, display)) / seeds;
  }
  const bool localised = worst_offset <= 2.0;
  const bool similar = uiqi_composed >= 0.9 * uiqi_estimated;
  return {localised && similar,
          format("worst wire centroid offset %.2f voxels (%s); UIQI estimated %.4f, composed %.4f, ratio %.2f (%s); %.0f s",
                 worst_offset, localised ? "ok" : "off", uiqi_estimated, uiqi_composed, uiqi_composed / uiqi_estimated,
                 similar ? "ok" : "below 0.9", seconds_since(start))};
}

// 9. Byte-identical pipeline outputs across runs and worker counts.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("vatk_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  RunConfig config;
  config.noise.seed = 7;
  const std::vector<std::pair<unsigned, std::string>> runs = {{1, "a"}, {1, "b"}, {4, "c"}};
  for (const auto& [threads, name] : runs) {
    set_thread_count(threads);
    config.output_dir = root / name;
    write_pipeline_outputs(config, run_pipeline(config));
  }
  set_thread_count(0);
  bool identical = true;
  std::size_t files = 0;
  for (const char* file : {"phantom.vol", "psf.vol", "degraded.vol", "restored.vol", "restored.json", "metrics.csv"}) {
    const auto reference = read_file(root / "a" / file);
    for (const char* other : {"b", "c"}) identical = identical && read_file(root / other / file) == reference;
    ++files;
  }
  fs::remove_all(root);
  return {identical, format("%zu output files compared over 2 runs at 1 worker and 1 run at 4 workers: %s", files,
                            identical ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, filter_identities}, {2, round_trip},        {3, filter_ranking}, {4, psf_geometry},  {5, field_oracle},
      {6, phase_recovery},    {7, metric_properties}, {8, lsf_pathway},    {9, determinism}};
  int unexpected = 0;
  for (const auto& [id, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const bool known = known_unattainable.count(id) > 0;
    std::printf("criterion %d: %s%s  %s\n", id, o.pass ? "PASS" : "FAIL",
                !o.pass && known ? " (known unattainable, see README)" : "", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
