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

#include "vatk/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <unistd.h>

namespace vatk {
namespace {

constexpr char volume_magic[8] = {'V', 'A', 'T', 'K', 'V', 'O', 'L', '\0'};
constexpr char sequence_magic[8] = {'V', 'A', 'T', 'K', 'S', 'E', 'Q', '\0'};

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  std::string take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) out_.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
  }
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string what) : in_(bytes), what_(std::move(what)) {}

  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(get(4))); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw IoError(what_ + ": truncated file");
  }
  std::uint64_t get(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int b = 0; b < bytes; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + b])) << (8 * b);
    }
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::string what_;
};

std::uint32_t checked_u32(std::size_t n, const char* what) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw IoError(std::string(what) + " does not fit the file format's 32-bit field");
  }
  return static_cast<std::uint32_t>(n);
}

void write_grid(ByteWriter& w, const Grid3D& g) {
  w.u32(checked_u32(g.dims.nx, "nx"));
  w.u32(checked_u32(g.dims.ny, "ny"));
  w.u32(checked_u32(g.dims.nz, "nz"));
  for (int a = 0; a < 3; ++a) w.f64(g.spacing[a]);
  for (int a = 0; a < 3; ++a) w.f64(g.origin[a]);
}

Grid3D read_grid(ByteReader& r, const std::string& what) {
  Grid3D g;
  g.dims.nx = r.u32();
  g.dims.ny = r.u32();
  g.dims.nz = r.u32();
  for (int a = 0; a < 3; ++a) g.spacing[a] = r.f64();
  for (int a = 0; a < 3; ++a) g.origin[a] = r.f64();
  try {
    g.validate();
  } catch (const Error& e) {
    throw IoError(what + ": invalid grid in header: " + e.what());
  }
  return g;
}

float to_f32(double v) {
  if (!std::isfinite(v) || std::abs(v) > std::numeric_limits<float>::max()) {
    throw IoError("value " + std::to_string(v) + " is not representable as float32");
  }
  return static_cast<float>(v);
}

ByteWriter volume_prefix(const Grid3D& grid, VolumeDtype dtype) {
  VolumeHeader h{volume_format_version, dtype, grid};
  ByteWriter w(volume_header_size + h.payload_bytes());
  w.raw(volume_magic, sizeof volume_magic);
  w.u16(volume_format_version);
  w.u16(static_cast<std::uint16_t>(dtype));
  write_grid(w, grid);
  return w;
}

VolumeHeader read_volume_prefix(ByteReader& r) {
  if (r.raw(8) != std::string_view(volume_magic, 8)) throw IoError("volume: bad magic");
  VolumeHeader h;
  h.version = r.u16();
  if (h.version != volume_format_version) {
    throw IoError("volume: unsupported version " + std::to_string(h.version));
  }
  const auto dtype = r.u16();
  if (dtype != 1 && dtype != 2) throw IoError("volume: unknown dtype " + std::to_string(dtype));
  h.dtype = static_cast<VolumeDtype>(dtype);
  h.grid = read_grid(r, "volume");
  if (r.remaining() != h.payload_bytes()) {
    throw IoError("volume: payload has " + std::to_string(r.remaining()) + " bytes, header implies " +
                  std::to_string(h.payload_bytes()));
  }
  return h;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string pgm_header(std::size_t width, std::size_t height) {
  return "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
}

}  // namespace

std::string to_string(VolumeDtype dtype) {
  return dtype == VolumeDtype::real32 ? "real32" : "complex64";
}

std::size_t VolumeHeader::payload_bytes() const {
  return grid.size() * (dtype == VolumeDtype::real32 ? 4 : 8);
}

std::string encode_volume(const RealVolume& v) {
  auto w = volume_prefix(v.grid(), VolumeDtype::real32);
  for (double x : v.values()) w.f32(to_f32(x));
  return w.take();
}

std::string encode_volume(const ComplexVolume& v) {
  auto w = volume_prefix(v.grid(), VolumeDtype::complex64);
  for (const Complex& z : v.values()) {
    w.f32(to_f32(z.real()));
    w.f32(to_f32(z.imag()));
  }
  return w.take();
}

VolumeHeader decode_volume_header(std::string_view bytes) {
  ByteReader r(bytes, "volume");
  return read_volume_prefix(r);
}

RealVolume decode_real_volume(std::string_view bytes) {
  ByteReader r(bytes, "volume");
  const auto h = read_volume_prefix(r);
  if (h.dtype != VolumeDtype::real32) throw IoError("volume: expected real32, found complex64");
  std::vector<double> values(h.grid.size());
  for (double& x : values) x = r.f32();
  return RealVolume(h.grid, std::move(values));
}

ComplexVolume decode_complex_volume(std::string_view bytes) {
  ByteReader r(bytes, "volume");
  const auto h = read_volume_prefix(r);
  std::vector<Complex> values(h.grid.size());
  for (Complex& z : values) {
    const double re = r.f32();
    const double im = h.dtype == VolumeDtype::complex64 ? r.f32() : 0.0;
    z = {re, im};
  }
  return ComplexVolume(h.grid, std::move(values));
}

void write_volume(const fs::path& path, const RealVolume& v) { write_file_atomic(path, encode_volume(v)); }
void write_volume(const fs::path& path, const ComplexVolume& v) { write_file_atomic(path, encode_volume(v)); }

VolumeHeader read_volume_header(const fs::path& path) { return decode_volume_header(read_file(path)); }
RealVolume read_real_volume(const fs::path& path) { return decode_real_volume(read_file(path)); }
ComplexVolume read_complex_volume(const fs::path& path) { return decode_complex_volume(read_file(path)); }

std::string encode_sequences(const SequenceSet& set) {
  set.validate();
  ByteWriter w(sequence_header_size + 8 * set.samples.size());
  w.raw(sequence_magic, sizeof sequence_magic);
  w.u16(volume_format_version);
  w.u16(0);
  write_grid(w, set.grid);
  w.u32(checked_u32(set.length, "sequence length"));
  w.u32(0);
  w.f64(set.sample_rate);
  w.f64(set.diff_freq);
  for (double x : set.samples) w.f64(x);
  return w.take();
}

SequenceSet decode_sequences(std::string_view bytes) {
  ByteReader r(bytes, "sequences");
  if (r.raw(8) != std::string_view(sequence_magic, 8)) throw IoError("sequences: bad magic");
  if (const auto version = r.u16(); version != volume_format_version) {
    throw IoError("sequences: unsupported version " + std::to_string(version));
  }
  r.u16();
  SequenceSet set;
  set.grid = read_grid(r, "sequences");
  set.length = r.u32();
  r.u32();
  set.sample_rate = r.f64();
  set.diff_freq = r.f64();
  const std::size_t count = set.grid.size() * set.length;
  if (r.remaining() != 8 * count) throw IoError("sequences: payload size does not match header");
  set.samples.resize(count);
  for (double& x : set.samples) x = r.f64();
  set.validate();
  return set;
}

void write_sequences(const fs::path& path, const SequenceSet& set) {
  write_file_atomic(path, encode_sequences(set));
}

SequenceSet read_sequences(const fs::path& path) { return decode_sequences(read_file(path)); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

RealVolume extract_plane(const RealVolume& v, Axis normal, std::size_t index) {
  const int a = static_cast<int>(normal);
  if (index >= v.dims()[a]) {
    throw Refusal("plane index " + std::to_string(index) + " outside " + describe(v.grid()));
  }
  IndexBox box;
  for (int b = 0; b < 3; ++b) box.hi[b] = v.dims()[b];
  box.lo[a] = index;
  box.hi[a] = index + 1;
  return crop(v, box);
}

std::size_t plane_index(const Grid3D& grid, Axis axis, double position) {
  const int a = static_cast<int>(axis);
  const double t = (position - grid.origin[a]) / grid.spacing[a];
  const double last = static_cast<double>(grid.dims[a] - 1);
  if (!(t >= -0.5 && t <= last + 0.5)) {
    throw Refusal("coordinate " + format_number(position) + " m lies outside " + describe(grid));
  }
  return static_cast<std::size_t>(std::clamp(std::round(t), 0.0, last));
}

std::string encode_pgm(const RealVolume& plane) {
  // The normal is the first one voxel thick axis, preferring z, then y, then x.
  int normal = -1;
  for (int a = 2; a >= 0 && normal < 0; --a) {
    if (plane.dims()[a] == 1) normal = a;
  }
  if (normal < 0) throw Refusal("PGM export needs a plane, got " + describe(plane.grid()));
  const std::array<int, 2> axes = normal == 2   ? std::array<int, 2>{0, 1}
                                  : normal == 1 ? std::array<int, 2>{0, 2}
                                                : std::array<int, 2>{1, 2};

  const std::size_t width = plane.dims()[axes[0]];
  const std::size_t height = plane.dims()[axes[1]];
  std::string out = pgm_header(width, height);
  out.reserve(out.size() + width * height);
  std::array<std::size_t, 3> idx{};
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      idx[axes[0]] = c;
      idx[axes[1]] = r;
      const double x = std::clamp(plane(idx[0], idx[1], idx[2]), 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * x))));
    }
  }
  return out;
}

void write_pgm(const fs::path& path, const RealVolume& plane) { write_file_atomic(path, encode_pgm(plane)); }

Profile extract_profile(const RealVolume& v, const LineSpec& line) {
  for (int a = 0; a < 3; ++a) {
    if (a != static_cast<int>(line.along) && line.through[a] >= v.dims()[a]) {
      throw Refusal("profile line passes outside " + describe(v.grid()));
    }
  }
  const int a = static_cast<int>(line.along);
  Profile p;
  auto idx = line.through;
  for (std::size_t n = 0; n < v.dims()[a]; ++n) {
    idx[a] = n;
    p.position.push_back(v.grid().position(idx[0], idx[1], idx[2])[a]);
    p.value.push_back(v(idx[0], idx[1], idx[2]));
  }
  return p;
}

std::string format_profile(const Profile& profile) {
  std::string out = "# position_mm gray_level\n";
  for (std::size_t n = 0; n < profile.value.size(); ++n) {
    out += format_number(profile.position[n] * 1e3) + " " + format_number(profile.value[n]) + "\n";
  }
  return out;
}

std::string render_profile_pgm(const Profile& profile, std::size_t width, std::size_t height) {
  if (width < 2 || height < 2) throw Refusal("profile raster needs at least 2x2 pixels");
  std::vector<unsigned char> img(width * height, 255);
  const std::size_t n = profile.value.size();
  auto row_of = [&](double v) {
    const double t = std::clamp(v, 0.0, 1.0);
    return static_cast<long>(std::lround((1.0 - t) * static_cast<double>(height - 1)));
  };
  long prev = -1;
  for (std::size_t c = 0; c < width && n > 0; ++c) {
    const double u = n == 1 ? 0.0 : static_cast<double>(c) * static_cast<double>(n - 1) / static_cast<double>(width - 1);
    const auto i0 = static_cast<std::size_t>(u);
    const std::size_t i1 = std::min(i0 + 1, n - 1);
    const double w = u - static_cast<double>(i0);
    const long r = row_of((1.0 - w) * profile.value[i0] + w * profile.value[i1]);
    // join to the previous column so steep edges stay connected
    const long lo = prev < 0 ? r : std::min(prev, r);
    const long hi = prev < 0 ? r : std::max(prev, r);
    for (long y = lo; y <= hi; ++y) img[static_cast<std::size_t>(y) * width + c] = 0;
    prev = r;
  }
  std::string out = pgm_header(width, height);
  out.append(reinterpret_cast<const char*>(img.data()), img.size());
  return out;
}

std::string format_metrics_row(const MetricsRow& row) {
  if (row.run_id.find_first_of(",\"\n") != std::string::npos) {
    throw ConfigError("run id must not contain commas, quotes or newlines");
  }
  return row.run_id + "," + row.filter + "," + format_number(row.gamma) + "," + format_number(row.alpha) +
         "," + format_number(row.nsr) + "," + format_number(row.snr_db) + "," + std::to_string(row.seed) +
         "," + format_number(row.isnr_db) + "," + format_number(row.mse) + "," + format_number(row.uiqi);
}

void append_metrics_csv(const fs::path& path, const MetricsRow& row) {
  std::string content;
  if (fs::exists(path)) {
    content = read_file(path);
    if (content.rfind(metrics_csv_header, 0) != 0) {
      throw IoError(path.string() + " exists but is not a metrics table");
    }
    if (!content.empty() && content.back() != '\n') content += '\n';
  } else {
    content = std::string(metrics_csv_header) + "\n";
  }
  content += format_metrics_row(row) + "\n";
  write_file_atomic(path, content);
}

}  // namespace vatk
