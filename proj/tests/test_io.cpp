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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <unistd.h>

#include "doctest.h"
#include "support.hpp"
#include "vatk/io.hpp"
#include "vatk/phantom.hpp"

using namespace vatk;
using vatk::test::small_grid;

namespace {

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vatk_test_io_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Grid3D odd_grid() {
  Grid3D g;
  g.dims = {5, 3, 4};
  g.spacing = {0.25e-3, 0.5e-3, 0.125e-3};
  g.origin = {-1e-3, 2e-3, 60e-3};
  return g;
}

template <typename T>
T read_le(const std::string& bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

}  // namespace

TEST_CASE("volume header fields sit at their documented offsets") {
  RealVolume v(odd_grid());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = static_cast<float>(0.1 * n);
  const auto bytes = encode_volume(v);
  CHECK(bytes.size() == volume_header_size + 4 * v.size());
  CHECK(bytes.substr(0, 8) == std::string("VATKVOL\0", 8));
  CHECK(read_le<std::uint16_t>(bytes, 8) == 1);
  CHECK(read_le<std::uint16_t>(bytes, 10) == 1);
  CHECK(read_le<std::uint32_t>(bytes, 12) == 5);
  CHECK(read_le<std::uint32_t>(bytes, 16) == 3);
  CHECK(read_le<std::uint32_t>(bytes, 20) == 4);
  CHECK(read_le<double>(bytes, 32) == 0.5e-3);
  CHECK(read_le<double>(bytes, 64) == 60e-3);
  CHECK(read_le<float>(bytes, 72 + 4 * 7) == static_cast<float>(0.1 * 7));
}

TEST_CASE("float32-representable volumes round-trip bit-exactly") {
  RealVolume r(odd_grid());
  ComplexVolume c(odd_grid());
  for (std::size_t n = 0; n < r.size(); ++n) {
    r[n] = static_cast<float>(std::sin(0.3 * n));
    c[n] = Complex(0.125 * static_cast<double>(n % 7) - 0.5, std::ldexp(static_cast<double>(n), -9));
  }
  const auto r2 = decode_real_volume(encode_volume(r));
  CHECK(r2 == r);
  CHECK(r2.grid() == r.grid());
  const auto c2 = decode_complex_volume(encode_volume(c));
  const bool complex_equal = c2 == c;
  CHECK(complex_equal);
  CHECK(decode_volume_header(encode_volume(c)).dtype == VolumeDtype::complex64);
  CHECK_THROWS_AS(decode_real_volume(encode_volume(c)), IoError);
  const auto promoted = decode_complex_volume(encode_volume(r));
  CHECK(promoted[3] == Complex(r[3], 0.0));

  const auto dir = scratch("roundtrip");
  write_volume(dir / "c.vol", c);
  const bool file_equal = read_complex_volume(dir / "c.vol") == c;
  CHECK(file_equal);
  CHECK(read_volume_header(dir / "c.vol").grid == c.grid());
}

TEST_CASE("damaged volume files are rejected") {
  RealVolume v(odd_grid(), 0.5);
  auto bytes = encode_volume(v);
  CHECK_THROWS_AS(decode_real_volume(bytes.substr(0, bytes.size() - 1)), IoError);
  CHECK_THROWS_AS(decode_real_volume(bytes.substr(0, 40)), IoError);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_real_volume(bad), IoError);
  bad = bytes;
  bad[8] = 9;
  CHECK_THROWS_AS(decode_real_volume(bad), IoError);
  v[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(encode_volume(v), IoError);
  CHECK_THROWS_AS(read_file(scratch("missing") / "nope.vol"), IoError);
}

TEST_CASE("sequence sets round-trip exactly") {
  SequenceSet s;
  s.grid = odd_grid();
  s.length = 40;
  s.sample_rate = 1.0e6;
  s.diff_freq = 50.0e3;
  s.samples.resize(s.grid.size() * s.length);
  for (std::size_t n = 0; n < s.samples.size(); ++n) s.samples[n] = std::sin(0.01 * n) / 3.0;
  const auto bytes = encode_sequences(s);
  CHECK(bytes.size() == sequence_header_size + 8 * s.samples.size());
  CHECK(read_le<std::uint32_t>(bytes, 72) == 40);
  CHECK(read_le<double>(bytes, 88) == 50.0e3);
  const auto back = decode_sequences(bytes);
  CHECK(back.samples == s.samples);
  CHECK(back.grid == s.grid);
  CHECK(back.length == s.length);
  CHECK(back.sample_rate == s.sample_rate);
  CHECK_THROWS_AS(decode_sequences(bytes.substr(0, bytes.size() - 8)), IoError);
  CHECK_THROWS_AS(decode_sequences(encode_volume(RealVolume(odd_grid()))), IoError);
}

TEST_CASE("PGM export clamps and quantises a plane") {
  RealVolume v(small_grid({3, 2, 4}));
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = 0.1 * static_cast<double>(n) - 0.5;
  const auto plane = extract_plane(v, Axis::z, 2);
  CHECK(plane.dims() == Dims{3, 2, 1});
  const auto pgm = encode_pgm(plane);
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(pgm.size() == header.size() + 6);
  CHECK(pgm.substr(0, header.size()) == header);
  for (std::size_t n = 0; n < 6; ++n) {
    const double x = std::clamp(plane[n], 0.0, 1.0);
    CHECK(static_cast<unsigned char>(pgm[header.size() + n]) == std::lround(255 * x));
  }
  const auto side = extract_plane(v, Axis::y, 1);
  CHECK(encode_pgm(side).substr(0, 10) == "P5\n3 4\n255");
  CHECK_THROWS_AS(encode_pgm(v), Refusal);
  CHECK_THROWS_AS(extract_plane(v, Axis::z, 4), Refusal);
}

TEST_CASE("plane_index rounds to the nearest plane and refuses far coordinates") {
  const auto g = odd_grid();
  CHECK(plane_index(g, Axis::z, 60e-3 + 0.26e-3) == 2);
  CHECK(plane_index(g, Axis::x, -1e-3 - 0.1e-3) == 0);
  CHECK_THROWS_AS(plane_index(g, Axis::z, 61e-3), Refusal);
}

TEST_CASE("a constant volume gives a flat profile") {
  const RealVolume v(small_grid({6, 7, 8}), 0.25);
  const auto p = extract_profile(v, {Axis::y, {2, 0, 5}});
  REQUIRE(p.value.size() == 7);
  for (double x : p.value) CHECK(x == 0.25);
  CHECK(p.position[1] - p.position[0] == doctest::Approx(1e-3));
  CHECK_THROWS_AS(extract_profile(v, {Axis::y, {6, 0, 5}}), Refusal);
}

TEST_CASE("phantom 2 profile through the small spheres shows two plateaus") {
  const auto spec = builtin_phantom("phantom2", 70e-3);
  const auto v = render_phantom(spec);
  const auto k = plane_index(spec.grid, Axis::z, 78e-3);
  const auto i = plane_index(spec.grid, Axis::x, 0.0);
  const auto p = extract_profile(v, {Axis::y, {i, 0, k}});
  std::set<double> levels(p.value.begin(), p.value.end());
  levels.erase(0.0);
  REQUIRE(levels.size() == 2);
  CHECK(*levels.rbegin() == 1.0);
  CHECK(*levels.begin() == doctest::Approx(contrast_to_amplitude(46.0)).epsilon(1e-12));
  const auto text = format_profile(p);
  CHECK(text.rfind("# position_mm gray_level\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == p.value.size() + 1);
  const auto raster = render_profile_pgm(p, 64, 32);
  CHECK(raster.rfind("P5\n64 32\n255\n", 0) == 0);
}

TEST_CASE("metrics rows append under a single header") {
  const auto dir = scratch("csv");
  MetricsRow row{"phantom1-wiener-s7", "wiener", 1.0, 0.5, 0.01, 20.0, 7, 41.5, 7.8e-4, 0.91};
  CHECK(format_metrics_row(row) == "phantom1-wiener-s7,wiener,1,0.5,0.01,20,7,41.5,0.00078,0.91");
  append_metrics_csv(dir / "metrics.csv", row);
  row.run_id = "second";
  append_metrics_csv(dir / "metrics.csv", row);
  const auto text = read_file(dir / "metrics.csv");
  CHECK(text.rfind(std::string(metrics_csv_header) + "\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.find("\nsecond,") != std::string::npos);
  row.run_id = "bad,id";
  CHECK_THROWS(format_metrics_row(row));
  std::ofstream(dir / "foreign.csv") << "a,b\n1,2\n";
  CHECK_THROWS_AS(append_metrics_csv(dir / "foreign.csv", MetricsRow{}), IoError);
}

TEST_CASE("atomic writes leave no temporary files behind") {
  const auto dir = scratch("atomic");
  write_file_atomic(dir / "a.bin", "first");
  write_file_atomic(dir / "a.bin", "second");
  CHECK(read_file(dir / "a.bin") == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(write_file_atomic(dir / "no_such_dir" / "a.bin", "x"), IoError);
}
