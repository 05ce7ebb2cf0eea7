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

#include "vatk/pipeline.hpp"

#include <cmath>

#include "json.hpp"
#include "vatk/phantom.hpp"

namespace vatk {

std::string to_string(GridPreset preset) { return preset == GridPreset::desk ? "desk" : "full"; }

GridPreset parse_grid_preset(const std::string& name) {
  if (name == "desk") return GridPreset::desk;
  if (name == "full") return GridPreset::full;
  throw ConfigError("unknown grid preset '" + name + "' (expected desk or full)");
}

Grid3D preset_grid(GridPreset preset, double focal_distance) {
  return preset == GridPreset::desk ? desk_grid(focal_distance) : full_grid(focal_distance);
}

void RunConfig::validate() const {
  auto check = [](auto&& fn, const std::string& where) {
    try {
      fn();
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
  };
  check([&] { transducer.validate(); }, "transducer");
  check([&] { medium.validate(); }, "medium");
  check([&] { effective_filter().validate(); }, "filter");
  if (!phantom_file) {
    check([&] { builtin_spec(); }, "phantom");
  }
  if (std::isnan(noise.snr_db) || noise.snr_db == -std::numeric_limits<double>::infinity()) {
    throw ConfigError("noise: snr_db must be a number or +inf");
  }
  if (field.patch_target < 0 || field.radial_step < 0) throw ConfigError("field: steps must be >= 0");
  if (metrics.uiqi.window < 2) throw ConfigError("metrics: window must be at least 2");
  if (metrics.levels == 1) throw ConfigError("metrics: levels must be 0 or at least 2");
  if (run_id.find_first_of(",\"\n") != std::string::npos) {
    throw ConfigError("run id must not contain commas, quotes or newlines");
  }
}

PhantomSpec RunConfig::builtin_spec() const {
  const double focus = transducer.focal_distance;
  return grid ? builtin_phantom(phantom, focus, preset_grid(*grid, focus)) : builtin_phantom(phantom, focus);
}

FilterParams RunConfig::effective_filter() const {
  FilterParams p = filter;
  if (nsr_from_snr) p.nsr = default_nsr(noise.snr_db);
  return p;
}

std::string RunConfig::effective_run_id() const {
  if (!run_id.empty()) return run_id;
  const std::string source = phantom_file ? phantom_file->stem().string() : phantom;
  return source + "-" + to_string(filter.kind) + "-s" + std::to_string(noise.seed);
}

Psf simulate_psf(const TransducerSpec& spec, const Medium& medium, const Grid3D& grid,
                 const FieldOptions& options) {
  const auto p1 = compute_pressure_field(spec, Element::inner, medium, grid, options);
  const auto p2 = compute_pressure_field(spec, Element::outer, medium, grid, options);
  return make_psf(p1, p2);
}

PipelineResult run_pipeline(const RunConfig& config) {
  config.validate();
  PipelineResult r;
  const double focus = config.transducer.focal_distance;
  r.phantom = config.phantom_file ? read_real_volume(*config.phantom_file) : render_phantom(config.builtin_spec());

  r.psf = simulate_psf(config.transducer, config.medium, kernel_grid(r.phantom.grid(), focus), config.field);
  const ComplexVolume kernel = line_kernel(r.psf, r.phantom.grid());
  r.degraded = add_noise(convolve(r.phantom, kernel), config.noise);

  const FilterParams params = config.effective_filter();
  const Deconvolver deconvolver(kernel, r.phantom.grid());
  r.transform_dims = deconvolver.transform_dims();
  r.restoration = deconvolver.apply(r.degraded, params);
  r.report = evaluate(r.phantom, real_part(r.degraded), r.restoration.restored_real, config.metrics);

  r.row = {config.effective_run_id(), to_string(params.kind), params.gamma, params.alpha, params.nsr,
           config.noise.snr_db, config.noise.seed, r.report.isnr_db, r.report.mse, r.report.uiqi};
  return r;
}

std::string restoration_diagnostics(const FilterParams& params, const RestorationResult& result,
                                    const Dims& transform_dims) {
  nlohmann::ordered_json j;
  j["filter"] = to_string(params.kind);
  j["gamma"] = params.gamma;
  j["alpha"] = params.alpha;
  j["nsr"] = params.nsr;
  j["nsr_spectrum"] = params.nsr_spectrum.has_value();
  j["transform_dims"] = {transform_dims.nx, transform_dims.ny, transform_dims.nz};
  j["guarded_bins"] = result.guarded_bins;
  j["imag_residual_norm"] = result.imag_residual_norm;
  return j.dump(2) + "\n";
}

void write_pipeline_outputs(const RunConfig& config, const PipelineResult& result) {
  const fs::path& dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_volume(dir / "phantom.vol", result.phantom);
  write_volume(dir / "psf.vol", result.psf.volume);
  write_volume(dir / "degraded.vol", result.degraded);
  write_volume(dir / "restored.vol", result.restoration.restored_real);
  write_file_atomic(dir / "restored.json",
                    restoration_diagnostics(config.effective_filter(), result.restoration, result.transform_dims));
  append_metrics_csv(dir / "metrics.csv", result.row);
}

}  // namespace vatk
