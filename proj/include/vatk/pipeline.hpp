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

#include <filesystem>
#include <optional>
#include <string>

#include "vatk/acoustic_field.hpp"
#include "vatk/forward_model.hpp"
#include "vatk/io.hpp"
#include "vatk/phantom.hpp"
#include "vatk/psf.hpp"
#include "vatk/quality.hpp"
#include "vatk/restoration.hpp"

namespace vatk {

enum class GridPreset { desk, full };

std::string to_string(GridPreset preset);
GridPreset parse_grid_preset(const std::string& name);
Grid3D preset_grid(GridPreset preset, double focal_distance);

/// Everything one end-to-end run depends on. All randomness derives from noise.seed.
struct RunConfig {
  std::string phantom = "phantom1";            ///< built-in phantom name
  std::optional<fs::path> phantom_file;        ///< real32 volume; overrides `phantom` and `grid`
  std::optional<GridPreset> grid;              ///< unset: the built-in phantom's own grid
  TransducerSpec transducer;
  Medium medium;
  FieldOptions field;
  NoiseSpec noise;
  FilterParams filter;
  bool nsr_from_snr = true;                    ///< replace filter.nsr by default_nsr(noise.snr_db)
  MetricOptions metrics;
  fs::path output_dir = ".";
  std::string run_id;                          ///< empty selects "<phantom>-<filter>-s<seed>"

  /// Throws ConfigError on the first invalid field. Called before any computation.
  void validate() const;
  PhantomSpec builtin_spec() const;
  FilterParams effective_filter() const;
  std::string effective_run_id() const;
};

struct PipelineResult {
  RealVolume phantom;
  Psf psf;
  ComplexVolume degraded;
  RestorationResult restoration;
  QualityReport report;
  MetricsRow row;
  Dims transform_dims;
};

/// phantom -> PSF on kernel_grid -> forward model with noise -> restoration -> metrics.
PipelineResult run_pipeline(const RunConfig& config);

/// PSF of the configured transducer on `grid`.
Psf simulate_psf(const TransducerSpec& spec, const Medium& medium, const Grid3D& grid,
                 const FieldOptions& options = {});

/// Writes phantom.vol, psf.vol, degraded.vol, restored.vol, restored.json and appends the
/// metrics row to metrics.csv in config.output_dir.
void write_pipeline_outputs(const RunConfig& config, const PipelineResult& result);

/// Diagnostics sidecar for a restoration, as a JSON document.
std::string restoration_diagnostics(const FilterParams& params, const RestorationResult& result,
                                    const Dims& transform_dims);

}  // namespace vatk
