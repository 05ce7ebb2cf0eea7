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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vatk/signal_phase.hpp"
#include "vatk/volume.hpp"

namespace vatk {

namespace fs = std::filesystem;

// Volume file layout, little-endian throughout:
//   0  char[8]  magic "VATKVOL\0"
//   8  u16      version (1)
//  10  u16      dtype (1 = real32, 2 = complex64 as interleaved re, im)
//  12  u32[3]   nx, ny, nz
//  24  f64[3]   spacing, m
//  48  f64[3]   origin, m
//  72  payload  float32 samples, x fastest
inline constexpr std::uint16_t volume_format_version = 1;
inline constexpr std::size_t volume_header_size = 72;

enum class VolumeDtype : std::uint16_t { real32 = 1, complex64 = 2 };

std::string to_string(VolumeDtype dtype);

struct VolumeHeader {
  std::uint16_t version = volume_format_version;
  VolumeDtype dtype = VolumeDtype::real32;
  Grid3D grid;

  std::size_t payload_bytes() const;
};

/// Serialised file image. Values are rounded to float32; a volume whose values are already
/// float32-representable round-trips bit-exactly.
std::string encode_volume(const RealVolume& v);
std::string encode_volume(const ComplexVolume& v);

VolumeHeader decode_volume_header(std::string_view bytes);
RealVolume decode_real_volume(std::string_view bytes);
/// Accepts both dtypes; real32 payloads get zero imaginary parts.
ComplexVolume decode_complex_volume(std::string_view bytes);

void write_volume(const fs::path& path, const RealVolume& v);
void write_volume(const fs::path& path, const ComplexVolume& v);
VolumeHeader read_volume_header(const fs::path& path);
RealVolume read_real_volume(const fs::path& path);
ComplexVolume read_complex_volume(const fs::path& path);

// Sequence file layout, little-endian:
//   0  char[8]  magic "VATKSEQ\0"
//   8  u16      version (1)
//  10  u16      reserved (0)
//  12  u32[3]   nx, ny, nz of the pixel grid
//  24  f64[3]   spacing, m
//  48  f64[3]   origin, m
//  72  u32      samples per pixel
//  76  u32      reserved (0)
//  80  f64      sample rate, Hz
//  88  f64      difference frequency, Hz
//  96  payload  float64 samples, pixel-major
inline constexpr std::size_t sequence_header_size = 96;

std::string encode_sequences(const SequenceSet& set);
SequenceSet decode_sequences(std::string_view bytes);
void write_sequences(const fs::path& path, const SequenceSet& set);
SequenceSet read_sequences(const fs::path& path);

std::string read_file(const fs::path& path);
/// Writes to a temporary sibling and renames it over `path`, so readers never observe a
/// partially written file.
void write_file_atomic(const fs::path& path, std::string_view bytes);

/// One voxel thick plane of `v` normal to `normal` at index `index`.
RealVolume extract_plane(const RealVolume& v, Axis normal, std::size_t index);

/// Index of the plane normal to `axis` nearest to coordinate `position` (metres).
/// Throws Refusal when the coordinate lies outside the grid by more than half a voxel.
std::size_t plane_index(const Grid3D& grid, Axis axis, double position);

/// 8-bit binary PGM of a one voxel thick plane. Values are clamped to [0, 1] and mapped to
/// round(255 v). Rows run along the second in-plane axis, columns along the first.
std::string encode_pgm(const RealVolume& plane);
void write_pgm(const fs::path& path, const RealVolume& plane);

/// Axis-aligned line through voxel `through` along `along`.
struct LineSpec {
  Axis along = Axis::x;
  std::array<std::size_t, 3> through{};
};

struct Profile {
  std::vector<double> position;  ///< metres along the line axis
  std::vector<double> value;
};

/// Throws Refusal when the line lies outside the grid.
Profile extract_profile(const RealVolume& v, const LineSpec& line);

/// Two whitespace-separated columns: position in mm and gray level.
std::string format_profile(const Profile& profile);

/// Gray levels plotted as a dark polyline on a white `width` x `height` PGM raster, with the
/// vertical axis spanning [0, 1].
std::string render_profile_pgm(const Profile& profile, std::size_t width = 512, std::size_t height = 256);

/// One row of the metrics table.
struct MetricsRow {
  std::string run_id;
  std::string filter;
  double gamma = 0.0;
  double alpha = 0.0;
  double nsr = 0.0;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  double isnr_db = 0.0;
  double mse = 0.0;
  double uiqi = 0.0;
};

inline constexpr std::string_view metrics_csv_header =
    "run_id,filter,gamma,alpha,nsr,snr_db,seed,isnr_db,mse,uiqi";

std::string format_metrics_row(const MetricsRow& row);

/// Appends `row` to the CSV at `path`, writing the header first if the file is new. The
/// whole file is rewritten atomically.
void append_metrics_csv(const fs::path& path, const MetricsRow& row);

}  // namespace vatk
