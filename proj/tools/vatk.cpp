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

// Command-line front end: one subcommand per toolkit operation, plus the end-to-end pipeline.
//
// Exit status: 0 success, 1 I/O failure, 2 invalid configuration, 3 numerical refusal.
// Failures print one JSON object to stderr: {"error": <kind>, "message": <text>}.

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
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
using json = nlohmann::ordered_json;

constexpr double mm = 1e-3;

enum class ExitCode { ok = 0, io = 1, config = 2, refusal = 3 };

int report_error(ExitCode code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
  return static_cast<int>(code);
}

void emit(const json& j) { std::cout << j.dump() << "\n"; }

double parse_db(const std::string& text, const char* flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || std::isnan(v)) throw ConfigError(std::string(flag) + ": not a number: " + text);
  return v;
}

template <typename T>
std::array<T, 3> triple(const std::vector<T>& v, const char* flag) {
  if (v.size() != 3) throw ConfigError(std::string(flag) + " takes three comma-separated values");
  return {v[0], v[1], v[2]};
}

// Transducer, medium and discretisation flags in practical units.
struct TransducerFlags {
  double inner_radius_mm = 14.8;
  double ring_inner_mm = 15.2;
  double ring_outer_mm = 22.0;
  double focal_mm = 70.0;
  double freq_inner_hz = 3.075e6;
  double freq_outer_hz = 3.125e6;
  double sound_speed = 1500.0;
  double density = 1000.0;
  double patch_target_mm = 0.0;
  double radial_step_mm = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--inner-radius-mm", inner_radius_mm, "inner element radius")->capture_default_str();
    app->add_option("--ring-inner-mm", ring_inner_mm, "outer element inner radius")->capture_default_str();
    app->add_option("--ring-outer-mm", ring_outer_mm, "outer element outer radius")->capture_default_str();
    app->add_option("--focal-mm", focal_mm, "geometric focal distance")->capture_default_str();
    app->add_option("--freq-inner-hz", freq_inner_hz, "inner element drive frequency")->capture_default_str();
    app->add_option("--freq-outer-hz", freq_outer_hz, "outer element drive frequency")->capture_default_str();
    app->add_option("--sound-speed", sound_speed, "m/s")->capture_default_str();
    app->add_option("--density", density, "kg/m^3")->capture_default_str();
    app->add_option("--patch-target-mm", patch_target_mm, "aperture patch size, 0 = quarter wavelength")
        ->capture_default_str();
    app->add_option("--radial-step-mm", radial_step_mm, "radial table step, 0 = quarter wavelength")
        ->capture_default_str();
  }

  TransducerSpec spec() const {
    return {inner_radius_mm * mm, ring_inner_mm * mm, ring_outer_mm * mm, focal_mm * mm, freq_inner_hz, freq_outer_hz};
  }
  Medium medium() const { return {sound_speed, density}; }
  FieldOptions field() const { return {patch_target_mm * mm, radial_step_mm * mm, 1.0}; }

  void validate() const {
    try {
      spec().validate();
      medium().validate();
    } catch (const Refusal& e) {
      throw ConfigError(e.what());
    }
    if (patch_target_mm < 0 || radial_step_mm < 0) throw ConfigError("step sizes must be >= 0");
  }
};

// Simulation grid: a preset, or explicit dims and isotropic spacing centred on the focus.
struct GridFlags {
  std::string preset = "desk";
  std::vector<std::size_t> dims;
  double spacing_mm = 0.0;
  bool kernel = false;

  void attach(CLI::App* app) {
    app->add_option("--grid", preset, "grid preset: desk (128x128x256 at 0.25 mm) or full (256x256x512 at 0.125 mm)")
        ->capture_default_str();
    app->add_option("--dims", dims, "explicit nx,ny,nz centred on the focus")->delimiter(',')->expected(3);
    app->add_option("--spacing-mm", spacing_mm, "isotropic spacing for --dims");
    app->add_flag("--kernel", kernel, "use the PSF support for the selected image grid (half extent)");
  }

  Grid3D grid(double focal_distance) const {
    Grid3D g;
    if (!dims.empty()) {
      if (!(spacing_mm > 0)) throw ConfigError("--dims needs --spacing-mm > 0");
      const auto d = triple(dims, "--dims");
      g = focal_grid({d[0], d[1], d[2]}, {spacing_mm * mm, spacing_mm * mm, spacing_mm * mm}, focal_distance);
    } else {
      g = preset_grid(parse_grid_preset(preset), focal_distance);
    }
    return kernel ? kernel_grid(g, focal_distance) : g;
  }
};

struct MetricFlags {
  std::size_t window = 8;
  std::string mode = "slice";
  std::string normal;
  std::string scale = "clamp";
  unsigned levels = 255;

  void attach(CLI::App* app) {
    app->add_option("--window", window, "UIQI window edge, voxels")->capture_default_str();
    app->add_option("--uiqi-mode", mode, "slice or volume")->capture_default_str();
    app->add_option("--slice-normal", normal, "x, y or z; default: the thin axis, else z");
    app->add_option("--scale", scale, "restored intensity mapping: none, clamp or peak")->capture_default_str();
    app->add_option("--levels", levels, "gray levels after scaling, 0 = unquantized")->capture_default_str();
  }

  MetricOptions options() const {
    MetricOptions o;
    o.uiqi.window = window;
    if (mode == "slice") {
      o.uiqi.mode = UiqiMode::slice;
    } else if (mode == "volume") {
      o.uiqi.mode = UiqiMode::volume;
    } else {
      throw ConfigError("unknown UIQI mode '" + mode + "'");
    }
    if (!normal.empty()) o.uiqi.slice_normal = parse_axis(normal);
    o.scale = parse_intensity_scale(scale);
    o.levels = levels;
    if (window < 2) throw ConfigError("--window must be at least 2");
    if (levels == 1) throw ConfigError("--levels must be 0 or at least 2");
    return o;
  }

  static Axis parse_axis(const std::string& name) {
    if (name == "x") return Axis::x;
    if (name == "y") return Axis::y;
    if (name == "z") return Axis::z;
    throw ConfigError("unknown axis '" + name + "'");
  }
};

struct FilterFlags {
  std::string kind = "wiener";
  double gamma = 1.0;
  double alpha = 0.5;
  std::optional<double> nsr;
  std::optional<std::string> snr_db;
  std::string nsr_spectrum;

  void attach(CLI::App* app, bool with_snr) {
    app->add_option("--filter", kind, "wiener, cls or gm")->capture_default_str();
    app->add_option("--gamma", gamma, "cls Laplacian weight; gm noise-term multiplier")->capture_default_str();
    app->add_option("--alpha", alpha, "gm blend exponent in [0, 1]")->capture_default_str();
    app->add_option("--nsr", nsr, "noise-to-signal ratio relative to the kernel energy");
    app->add_option("--nsr-spectrum", nsr_spectrum, "real32 volume of per-frequency ratios on the transform grid");
    if (with_snr) app->add_option("--snr-db", snr_db, "derive --nsr from an image SNR when --nsr is absent");
  }

  FilterParams params() const {
    FilterParams p;
    p.kind = parse_filter(kind);
    p.gamma = gamma;
    p.alpha = alpha;
    if (nsr) {
      p.nsr = *nsr;
    } else if (snr_db) {
      p.nsr = default_nsr(parse_db(*snr_db, "--snr-db"));
    }
    if (!nsr_spectrum.empty()) p.nsr_spectrum = read_real_volume(nsr_spectrum);
    try {
      p.validate();
    } catch (const Refusal& e) {
      throw ConfigError(e.what());
    }
    return p;
  }
};

IntensityScale scale_or_throw(const std::string& name) { return parse_intensity_scale(name); }

RealVolume display_volume(const fs::path& path, IntensityScale scale) {
  const auto header = read_volume_header(path);
  RealVolume v = header.dtype == VolumeDtype::real32 ? read_real_volume(path) : magnitude(read_complex_volume(path));
  return rescale_intensity(v, scale);
}

json grid_json(const Grid3D& g) {
  return {{"dims", {g.dims.nx, g.dims.ny, g.dims.nz}},
          {"spacing_mm", {g.spacing.x / mm, g.spacing.y / mm, g.spacing.z / mm}},
          {"origin_mm", {g.origin.x / mm, g.origin.y / mm, g.origin.z / mm}}};
}

std::array<std::size_t, 3> voxel_of(const Grid3D& grid, const std::vector<std::size_t>& v, const char* flag) {
  const auto t = triple(v, flag);
  for (int a = 0; a < 3; ++a) {
    if (t[a] >= grid.dims[a]) throw Refusal(std::string(flag) + " lies outside " + describe(grid));
  }
  return t;
}

void add_threads_option(CLI::App& app, unsigned& threads) {
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vibro-acoustography PSF simulation and image restoration toolkit", "vatk"};
  app.set_config("--config", "", "INI file; [subcommand] sections hold flag = value lines");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  unsigned threads = 0;
  add_threads_option(app, threads);

  std::function<void()> run;
  auto command = [&](const std::string& name, const std::string& help) {
    return app.add_subcommand(name, help);
  };

  // simulate-field
  TransducerFlags sf_tx;
  GridFlags sf_grid;
  std::string sf_element = "inner";
  std::string sf_out;
  auto* sf = command("simulate-field", "pressure field of one element on a grid");
  sf_tx.attach(sf);
  sf_grid.attach(sf);
  sf->add_option("--element", sf_element, "inner or outer")->capture_default_str();
  sf->add_option("--out", sf_out, "complex64 volume")->required();
  sf->callback([&] {
    run = [&] {
      sf_tx.validate();
      const auto grid = sf_grid.grid(sf_tx.spec().focal_distance);
      const auto element = parse_element(sf_element);
      const auto p = compute_pressure_field(sf_tx.spec(), element, sf_tx.medium(), grid, sf_tx.field());
      write_volume(sf_out, p);
      emit({{"command", "simulate-field"}, {"element", to_string(element)}, {"grid", grid_json(grid)}, {"out", sf_out}});
    };
  });

  // make-psf
  TransducerFlags mp_tx;
  GridFlags mp_grid;
  std::string mp_p1, mp_p2, mp_out;
  auto* mp = command("make-psf", "h = conj(p1) p2 from two element fields, or simulated directly");
  mp_tx.attach(mp);
  mp_grid.attach(mp);
  mp->add_option("--p1", mp_p1, "inner element field volume");
  mp->add_option("--p2", mp_p2, "outer element field volume");
  mp->add_option("--out", mp_out, "complex64 volume")->required();
  mp->callback([&] {
    run = [&] {
      if (mp_p1.empty() != mp_p2.empty()) throw ConfigError("--p1 and --p2 go together");
      Psf psf;
      if (!mp_p1.empty()) {
        psf = make_psf(read_complex_volume(mp_p1), read_complex_volume(mp_p2));
      } else {
        mp_tx.validate();
        psf = simulate_psf(mp_tx.spec(), mp_tx.medium(), mp_grid.grid(mp_tx.spec().focal_distance), mp_tx.field());
      }
      write_volume(mp_out, psf.volume);
      json j{{"command", "make-psf"}, {"grid", grid_json(psf.volume.grid())}, {"normalization", psf.normalization}};
      const auto cell = measure_resolution(psf.volume);
      j["resolution_mm"] = {{"x", cell.width_x / mm}, {"y", cell.width_y / mm}, {"z", cell.extent_z / mm}};
      j["out"] = mp_out;
      emit(j);
    };
  });

  // make-phantom
  std::string ph_name = "phantom1", ph_grid, ph_out;
  double ph_focal_mm = 70.0, ph_pitch_mm = 0.1;
  auto* ph = command("make-phantom", "render a built-in phantom");
  ph->add_option("--phantom", ph_name, "phantom1, phantom2 or wire3")->capture_default_str();
  ph->add_option("--grid", ph_grid, "desk or full; default: the phantom's own grid");
  ph->add_option("--pitch-mm", ph_pitch_mm, "wire3 scan pitch")->capture_default_str();
  ph->add_option("--focal-mm", ph_focal_mm)->capture_default_str();
  ph->add_option("--out", ph_out, "real32 volume")->required();
  ph->callback([&] {
    run = [&] {
      const double f = ph_focal_mm * mm;
      Grid3D grid;
      if (!ph_grid.empty()) {
        grid = preset_grid(parse_grid_preset(ph_grid), f);
      } else {
        grid = ph_name == "wire3" ? wire_scan_grid(f, ph_pitch_mm * mm) : desk_grid(f);
      }
      const auto v = render_phantom(builtin_phantom(ph_name, f, grid));
      write_volume(ph_out, v);
      emit({{"command", "make-phantom"}, {"phantom", ph_name}, {"grid", grid_json(grid)}, {"out", ph_out}});
    };
  });

  // forward
  std::string fw_phantom, fw_psf, fw_out, fw_snr = "20";
  std::uint64_t fw_seed = 0;
  auto* fw = command("forward", "degraded image: phantom convolved with the PSF plus noise");
  fw->add_option("--phantom", fw_phantom, "real32 phantom volume")->required();
  fw->add_option("--psf", fw_psf, "PSF volume")->required();
  fw->add_option("--snr-db", fw_snr, "image SNR in dB, inf for noiseless")->capture_default_str();
  fw->add_option("--seed", fw_seed)->capture_default_str();
  fw->add_option("--out", fw_out, "complex64 volume")->required();
  fw->callback([&] {
    run = [&] {
      const NoiseSpec noise{parse_db(fw_snr, "--snr-db"), fw_seed};
      const auto f = read_real_volume(fw_phantom);
      const Psf psf{read_complex_volume(fw_psf), 1.0};
      const auto g = add_noise(convolve(f, line_kernel(psf, f.grid())), noise);
      write_volume(fw_out, g);
      emit({{"command", "forward"}, {"snr_db", noise.snr_db}, {"seed", noise.seed}, {"out", fw_out}});
    };
  });

  // restore
  FilterFlags rs_filter;
  std::string rs_degraded, rs_psf, rs_out;
  auto* rs = command("restore", "frequency-domain deconvolution");
  rs_filter.attach(rs, true);
  rs->add_option("--degraded", rs_degraded, "degraded image volume")->required();
  rs->add_option("--psf", rs_psf, "PSF or LSF volume")->required();
  rs->add_option("--out", rs_out, "real32 restored volume; diagnostics go to <out>.json")->required();
  rs->callback([&] {
    run = [&] {
      const auto params = rs_filter.params();
      const auto g = read_complex_volume(rs_degraded);
      const Psf psf{read_complex_volume(rs_psf), 1.0};
      const Deconvolver deconvolver(line_kernel(psf, g.grid()), g.grid());
      const auto result = deconvolver.apply(g, params);
      write_volume(rs_out, result.restored_real);
      write_file_atomic(rs_out + ".json", restoration_diagnostics(params, result, deconvolver.transform_dims()));
      emit({{"command", "restore"},
            {"filter", to_string(params.kind)},
            {"guarded_bins", result.guarded_bins},
            {"imag_residual_norm", result.imag_residual_norm},
            {"out", rs_out}});
    };
  });

  // metrics
  MetricFlags mt_flags;
  std::string mt_reference, mt_degraded, mt_restored, mt_csv, mt_run_id, mt_filter, mt_snr = "nan";
  double mt_gamma = 0, mt_alpha = 0, mt_nsr = 0;
  std::uint64_t mt_seed = 0;
  auto* mt = command("metrics", "ISNR, MSE and UIQI of a restoration");
  mt_flags.attach(mt);
  mt->add_option("--reference", mt_reference, "real32 reference volume")->required();
  mt->add_option("--degraded", mt_degraded, "degraded volume (real part is used)")->required();
  mt->add_option("--restored", mt_restored, "real32 restored volume")->required();
  mt->add_option("--csv", mt_csv, "append a metrics row to this table");
  mt->add_option("--run-id", mt_run_id, "row label");
  mt->add_option("--row-filter", mt_filter, "filter column value");
  mt->add_option("--row-gamma", mt_gamma);
  mt->add_option("--row-alpha", mt_alpha);
  mt->add_option("--row-nsr", mt_nsr);
  mt->add_option("--row-snr-db", mt_snr);
  mt->add_option("--row-seed", mt_seed);
  mt->callback([&] {
    run = [&] {
      const auto options = mt_flags.options();
      const double snr = mt_snr == "nan" ? std::numeric_limits<double>::quiet_NaN() : parse_db(mt_snr, "--row-snr-db");
      const auto f = read_real_volume(mt_reference);
      const auto g = real_part(read_complex_volume(mt_degraded));
      const auto r = read_real_volume(mt_restored);
      const auto q = evaluate(f, g, r, options);
      if (!mt_csv.empty()) {
        append_metrics_csv(mt_csv, {mt_run_id, mt_filter, mt_gamma, mt_alpha, mt_nsr, snr, mt_seed, q.isnr_db, q.mse, q.uiqi});
      }
      emit({{"command", "metrics"}, {"isnr_db", q.isnr_db}, {"mse", q.mse}, {"uiqi", q.uiqi}});
    };
  });

  // estimate-lsf
  std::string el_image, el_out, el_inverted;
  std::vector<std::size_t> el_center, el_size;
  double el_cutoff = 0.0, el_wire_mm = 0.5;
  auto* el = command("estimate-lsf", "LSF of one wire by spectral inversion");
  el->add_option("--image", el_image, "complex image volume")->required();
  el->add_option("--center", el_center, "region centre voxel i,j,k")->delimiter(',')->expected(3)->required();
  el->add_option("--size", el_size, "region size nx,ny,nz in voxels")->delimiter(',')->expected(3)->required();
  el->add_option("--cutoff-per-mm", el_cutoff, "low-pass cutoff in cycles/mm; 0 = one tenth of 1/wire diameter")
      ->capture_default_str();
  el->add_option("--wire-diameter-mm", el_wire_mm)->capture_default_str();
  el->add_option("--out", el_out, "complex64 LSF volume")->required();
  el->add_option("--inverted-out", el_inverted,
                 "also write the spectrally inverted image, the input to restore with this LSF");
  el->callback([&] {
    run = [&] {
      if (el_cutoff < 0 || !(el_wire_mm > 0)) throw ConfigError("cutoff must be >= 0 and wire diameter > 0");
      const auto image = read_complex_volume(el_image);
      const auto centre = voxel_of(image.grid(), el_center, "--center");
      const auto size = triple(el_size, "--size");
      const auto box = centred_box(image.grid(), centre, {size[0], size[1], size[2]});
      const double cutoff = el_cutoff > 0 ? el_cutoff / mm : default_lsf_cutoff(el_wire_mm * mm);
      const auto lsf = estimate_lsf(image, box, cutoff);
      write_volume(el_out, lsf);
      if (!el_inverted.empty()) write_volume(el_inverted, spectral_inversion(image, cutoff));
      json result{{"command", "estimate-lsf"}, {"cutoff_per_mm", cutoff * mm}, {"grid", grid_json(lsf.grid())}, {"out", el_out}};
      if (!el_inverted.empty()) result["inverted_out"] = el_inverted;
      emit(result);
    };
  });

  // phase-map
  std::string pm_sequences, pm_image, pm_out, pm_save, pm_seq_snr = "inf";
  std::vector<std::size_t> pm_reference;
  double pm_rate = 1e6, pm_diff = 50e3;
  std::size_t pm_length = 512;
  std::uint64_t pm_seed = 0;
  auto* pm = command("phase-map", "per-pixel phase relative to a reference pixel from difference-frequency sequences");
  pm->add_option("--sequences", pm_sequences, "sequence file");
  pm->add_option("--image", pm_image, "complex image to synthesise sequences from instead");
  pm->add_option("--sample-rate", pm_rate, "Hz, with --image")->capture_default_str();
  pm->add_option("--diff-freq", pm_diff, "Hz, with --image")->capture_default_str();
  pm->add_option("--length", pm_length, "samples per pixel, with --image")->capture_default_str();
  pm->add_option("--seq-snr-db", pm_seq_snr, "sequence SNR, with --image; inf for noiseless")->capture_default_str();
  pm->add_option("--seed", pm_seed)->capture_default_str();
  pm->add_option("--save-sequences", pm_save, "write the synthesised sequences here");
  pm->add_option("--reference", pm_reference, "reference pixel i,j,k; default: largest amplitude")
      ->delimiter(',')
      ->expected(3);
  pm->add_option("--out", pm_out, "complex64 image: amplitude with relative phase")->required();
  pm->callback([&] {
    run = [&] {
      if (pm_sequences.empty() == pm_image.empty()) throw ConfigError("give exactly one of --sequences and --image");
      SequenceSet set;
      if (!pm_sequences.empty()) {
        set = read_sequences(pm_sequences);
      } else {
        const double snr = parse_db(pm_seq_snr, "--seq-snr-db");
        std::optional<SequenceNoise> noise;
        if (!(std::isinf(snr) && snr > 0)) noise = SequenceNoise{snr, pm_seed};
        set = synthesize_sequences(read_complex_volume(pm_image), pm_rate, pm_diff, pm_length, noise);
        if (!pm_save.empty()) write_sequences(pm_save, set);
      }
      std::size_t ref = 0;
      if (!pm_reference.empty()) {
        const auto r = voxel_of(set.grid, pm_reference, "--reference");
        ref = set.grid.index(r[0], r[1], r[2]);
      } else {
        double best = -1.0;
        for (std::size_t p = 0; p < set.grid.size(); ++p) {
          const double a = tone_amplitude(set.pixel(p));
          if (a > best) best = a, ref = p;
        }
      }
      const auto map = build_phase_map(set, ref);
      write_volume(pm_out, phase_map_image(map));
      const auto r = set.grid.unravel(ref);
      emit({{"command", "phase-map"}, {"reference", {r[0], r[1], r[2]}}, {"out", pm_out}});
    };
  });

  // compose-lsf
  std::string cl_magnitude, cl_phase, cl_out;
  bool cl_align = false;
  auto* cl = command("compose-lsf", "LSF with the magnitude of one source and the phase of another");
  cl->add_option("--magnitude", cl_magnitude, "magnitude source, e.g. a theoretical LSF")->required();
  cl->add_option("--phase", cl_phase, "phase source, e.g. an estimated LSF")->required();
  cl->add_flag("--align-peaks", cl_align, "shift the magnitude source onto the phase source's grid, peak on peak");
  cl->add_option("--out", cl_out, "complex64 volume")->required();
  cl->callback([&] {
    run = [&] {
      auto m = read_complex_volume(cl_magnitude);
      const auto p = read_complex_volume(cl_phase);
      if (cl_align) m = align_to_peak(m, p);
      write_volume(cl_out, compose_lsf(m, p));
      emit({{"command", "compose-lsf"}, {"out", cl_out}});
    };
  });

  // pipeline
  TransducerFlags pl_tx;
  FilterFlags pl_filter;
  MetricFlags pl_metrics;
  std::string pl_phantom = "phantom1", pl_phantom_file, pl_grid, pl_snr = "20", pl_out = ".", pl_run_id;
  std::uint64_t pl_seed = 0;
  auto* pl = command("pipeline", "phantom -> PSF -> forward -> restore -> metrics");
  pl_tx.attach(pl);
  pl_filter.attach(pl, false);
  pl_metrics.attach(pl);
  pl->add_option("--phantom", pl_phantom, "phantom1, phantom2 or wire3")->capture_default_str();
  pl->add_option("--phantom-file", pl_phantom_file, "real32 phantom volume instead of a built-in");
  pl->add_option("--grid", pl_grid, "desk or full; default: the phantom's own grid");
  pl->add_option("--snr-db", pl_snr, "image SNR in dB, inf for noiseless")->capture_default_str();
  pl->add_option("--seed", pl_seed)->capture_default_str();
  pl->add_option("--out-dir", pl_out)->capture_default_str();
  pl->add_option("--run-id", pl_run_id, "metrics row label");
  pl->callback([&] {
    run = [&] {
      RunConfig c;
      c.phantom = pl_phantom;
      if (!pl_phantom_file.empty()) c.phantom_file = pl_phantom_file;
      if (!pl_grid.empty()) c.grid = parse_grid_preset(pl_grid);
      pl_tx.validate();
      c.transducer = pl_tx.spec();
      c.medium = pl_tx.medium();
      c.field = pl_tx.field();
      c.noise = {parse_db(pl_snr, "--snr-db"), pl_seed};
      c.filter = pl_filter.params();
      c.nsr_from_snr = !pl_filter.nsr.has_value();
      c.metrics = pl_metrics.options();
      c.output_dir = pl_out;
      c.run_id = pl_run_id;
      c.validate();
      const auto result = run_pipeline(c);
      write_pipeline_outputs(c, result);
      const auto& q = result.report;
      emit({{"command", "pipeline"},
            {"run_id", result.row.run_id},
            {"filter", result.row.filter},
            {"isnr_db", q.isnr_db},
            {"mse", q.mse},
            {"uiqi", q.uiqi},
            {"imag_residual_norm", result.restoration.imag_residual_norm},
            {"out_dir", pl_out}});
    };
  });

  // export-slice
  std::string es_volume, es_plane = "transverse", es_scale = "peak", es_out;
  std::optional<double> es_depth_mm, es_x_mm, es_y_mm;
  std::optional<std::size_t> es_index;
  double es_focal_mm = 70.0;
  auto* es = command("export-slice", "8-bit PGM of one plane");
  es->add_option("--volume", es_volume, "real32 or complex64 volume (magnitude is shown)")->required();
  es->add_option("--plane", es_plane, "transverse (constant depth), axial-xz or axial-yz")->capture_default_str();
  es->add_option("--depth-mm", es_depth_mm, "transverse plane depth relative to the focus");
  es->add_option("--x-mm", es_x_mm, "axial-yz plane position");
  es->add_option("--y-mm", es_y_mm, "axial-xz plane position");
  es->add_option("--index", es_index, "plane index instead of a position");
  es->add_option("--focal-mm", es_focal_mm)->capture_default_str();
  es->add_option("--scale", es_scale, "none, clamp or peak")->capture_default_str();
  es->add_option("--out", es_out, "PGM file")->required();
  es->callback([&] {
    run = [&] {
      const auto v = display_volume(es_volume, scale_or_throw(es_scale));
      Axis normal;
      double position;
      if (es_plane == "transverse") {
        normal = Axis::z;
        position = es_focal_mm * mm + es_depth_mm.value_or(0.0) * mm;
      } else if (es_plane == "axial-xz") {
        normal = Axis::y;
        position = es_y_mm.value_or(0.0) * mm;
      } else if (es_plane == "axial-yz") {
        normal = Axis::x;
        position = es_x_mm.value_or(0.0) * mm;
      } else {
        throw ConfigError("unknown plane '" + es_plane + "'");
      }
      const std::size_t index = es_index ? *es_index : plane_index(v.grid(), normal, position);
      write_pgm(es_out, extract_plane(v, normal, index));
      emit({{"command", "export-slice"}, {"plane", es_plane}, {"index", index}, {"out", es_out}});
    };
  });

  // export-profile
  std::string ep_volume, ep_along = "y", ep_scale = "peak", ep_out;
  double ep_x_mm = 0, ep_y_mm = 0, ep_depth_mm = 0, ep_focal_mm = 70.0;
  auto* ep = command("export-profile", "gray levels along an axis-aligned line, as text columns and a plot");
  ep->add_option("--volume", ep_volume, "real32 or complex64 volume (magnitude is used)")->required();
  ep->add_option("--along", ep_along, "line axis: x, y or z")->capture_default_str();
  ep->add_option("--x-mm", ep_x_mm, "line position on x")->capture_default_str();
  ep->add_option("--y-mm", ep_y_mm, "line position on y")->capture_default_str();
  ep->add_option("--depth-mm", ep_depth_mm, "line depth relative to the focus")->capture_default_str();
  ep->add_option("--focal-mm", ep_focal_mm)->capture_default_str();
  ep->add_option("--scale", ep_scale, "none, clamp or peak")->capture_default_str();
  ep->add_option("--out", ep_out, "output prefix; writes <out>.txt and <out>.pgm")->required();
  ep->callback([&] {
    run = [&] {
      const auto v = display_volume(ep_volume, scale_or_throw(ep_scale));
      LineSpec line;
      line.along = MetricFlags::parse_axis(ep_along);
      const std::array<double, 3> at{ep_x_mm * mm, ep_y_mm * mm, ep_focal_mm * mm + ep_depth_mm * mm};
      for (int a = 0; a < 3; ++a) {
        if (a != static_cast<int>(line.along)) line.through[a] = plane_index(v.grid(), static_cast<Axis>(a), at[a]);
      }
      const auto profile = extract_profile(v, line);
      write_file_atomic(ep_out + ".txt", format_profile(profile));
      write_file_atomic(ep_out + ".pgm", render_profile_pgm(profile));
      emit({{"command", "export-profile"}, {"samples", profile.value.size()}, {"out", ep_out}});
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(ExitCode::config, "config", e.what());
  }

  try {
    set_thread_count(threads);
    if (run) run();
    return 0;
  } catch (const ConfigError& e) {
    return report_error(ExitCode::config, "config", e.what());
  } catch (const Refusal& e) {
    return report_error(ExitCode::refusal, "refusal", e.what());
  } catch (const IoError& e) {
    return report_error(ExitCode::io, "io", e.what());
  } catch (const std::exception& e) {
    return report_error(ExitCode::io, "error", e.what());
  }
}
