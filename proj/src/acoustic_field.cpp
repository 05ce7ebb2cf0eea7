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

#include "vatk/acoustic_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vatk/parallel.hpp"

namespace vatk {

namespace {

constexpr double kPi = std::numbers::pi;

// sin/cos of the propagation phase k r. Written without branches so the aperture loop
// vectorises; accurate to a few ulp for |phase| well beyond 1e4 rad.
inline void phase_sincos(double phase, double& s_out, double& c_out) {
  const double q = std::floor(phase * (2.0 / kPi) + 0.5);
  const double t = phase - q * 1.57079632679489655800e+00 - q * 6.12323399573676603587e-17;
  const double t2 = t * t;
  const double s =
      t * (1.0 + t2 * (-1.0 / 6 + t2 * (1.0 / 120 + t2 * (-1.0 / 5040 + t2 * (1.0 / 362880 +
      t2 * (-1.0 / 39916800 + t2 * (1.0 / 6227020800.0 + t2 * (-1.0 / 1307674368000.0))))))));
  const double c =
      1.0 + t2 * (-0.5 + t2 * (1.0 / 24 + t2 * (-1.0 / 720 + t2 * (1.0 / 40320 +
      t2 * (-1.0 / 3628800 + t2 * (1.0 / 479001600.0 + t2 * (-1.0 / 87178291200.0 +
      t2 * (1.0 / 20922789888000.0))))))));
  // quadrant = q mod 4, decomposed as 2*b1 + b0
  const double quadrant = q - 4.0 * std::floor(q * 0.25);
  const double b1 = std::floor(quadrant * 0.5);
  const double b0 = quadrant - 2.0 * b1;
  const double sign = 1.0 - 2.0 * b1;
  s_out = sign * (s + b0 * (c - s));
  c_out = sign * (c - b0 * (s + c));
}

double resolve(double requested, double fallback) { return requested > 0.0 ? requested : fallback; }

}  // namespace

void TransducerSpec::validate() const {
  if (!(inner_radius > 0.0)) throw Refusal("transducer: inner_radius must be positive");
  if (!(inner_radius < ring_inner_radius)) {
    throw Refusal("transducer: inner element overlaps the ring (inner_radius >= ring_inner_radius)");
  }
  if (!(ring_inner_radius < ring_outer_radius)) {
    throw Refusal("transducer: outer element has zero area (ring_inner_radius >= ring_outer_radius)");
  }
  if (!(focal_distance > ring_outer_radius)) {
    throw Refusal("transducer: focal_distance must exceed ring_outer_radius");
  }
  if (!(freq_inner > 0.0 && freq_outer > 0.0)) throw Refusal("transducer: drive frequencies must be positive");
  if (freq_inner == freq_outer) throw Refusal("transducer: drive frequencies must differ");
}

void Medium::validate() const {
  if (!(sound_speed > 0.0) || !(density > 0.0)) {
    throw Refusal("medium: sound speed and density must be positive");
  }
}

std::string to_string(Element e) { return e == Element::inner ? "inner" : "outer"; }

Element parse_element(const std::string& name) {
  if (name == "inner") return Element::inner;
  if (name == "outer") return Element::outer;
  throw ConfigError("unknown element '" + name + "' (expected inner or outer)");
}

double drive_frequency(const TransducerSpec& spec, Element element) {
  return element == Element::inner ? spec.freq_inner : spec.freq_outer;
}

double wavenumber(const TransducerSpec& spec, Element element, const Medium& medium) {
  return 2.0 * kPi * drive_frequency(spec, element) / medium.sound_speed;
}

double wavelength(const TransducerSpec& spec, Element element, const Medium& medium) {
  return medium.sound_speed / drive_frequency(spec, element);
}

std::vector<Patch> discretize_aperture(const TransducerSpec& spec, Element element,
                                       double patch_target, const Medium& medium) {
  spec.validate();
  medium.validate();
  const double lambda = wavelength(spec, element, medium);
  if (!(patch_target > 0.0)) throw Refusal("discretize_aperture: patch_target must be positive");
  if (patch_target > 0.5 * lambda) {
    std::ostringstream os;
    os << "discretize_aperture: patch_target " << patch_target << " m is coarser than half the "
       << to_string(element) << "-element wavelength (" << 0.5 * lambda << " m)";
    throw Refusal(os.str());
  }

  const double R = spec.focal_distance;
  const double theta_lo = element == Element::inner ? 0.0 : std::asin(spec.ring_inner_radius / R);
  const double theta_hi =
      std::asin((element == Element::inner ? spec.inner_radius : spec.ring_outer_radius) / R);

  const auto rings =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(R * (theta_hi - theta_lo) / patch_target)));
  const double dtheta = (theta_hi - theta_lo) / static_cast<double>(rings);

  std::vector<Patch> patches;
  for (std::size_t j = 0; j < rings; ++j) {
    const double t0 = theta_lo + static_cast<double>(j) * dtheta;
    const double t1 = t0 + dtheta;
    const double c0 = std::cos(t0);
    const double c1 = std::cos(t1);
    const double tc = std::acos(0.5 * (c0 + c1));
    const double ring_radius = R * std::sin(tc);
    const auto sectors = std::max<std::size_t>(
        3, static_cast<std::size_t>(std::ceil(2.0 * kPi * ring_radius / patch_target)));
    const double dpsi = 2.0 * kPi / static_cast<double>(sectors);
    const double area = R * R * (c0 - c1) * dpsi;
    const double z = R - R * std::cos(tc);
    for (std::size_t m = 0; m < sectors; ++m) {
      const double psi = (static_cast<double>(m) + 0.5) * dpsi;
      Patch p;
      p.center = {ring_radius * std::cos(psi), ring_radius * std::sin(psi), z};
      p.area = area;
      p.normal = (1.0 / R) * (Vec3{0.0, 0.0, R} - p.center);
      patches.push_back(p);
    }
  }
  return patches;
}

ApertureSum::ApertureSum(const TransducerSpec& spec, Element element, const Medium& medium,
                         const FieldOptions& options) {
  const double lambda = wavelength(spec, element, medium);
  const auto patches = discretize_aperture(spec, element, resolve(options.patch_target, 0.25 * lambda), medium);
  k_ = vatk::wavenumber(spec, element, medium);
  prefactor_ = Complex(0.0, medium.density * medium.sound_speed * k_ / (2.0 * kPi)) * options.normal_velocity;
  count_ = patches.size();
  for (const auto& p : patches) {
    x_.push_back(p.center.x);
    y_.push_back(p.center.y);
    z_.push_back(p.center.z);
    w_.push_back(p.area);
  }

  // Each ring is tiled at azimuths (m + 1/2) 2pi/M, which is symmetric under psi -> -psi.
  // Keep the half with psi in (0, pi], doubling the weight of mirrored pairs.
  for (const auto& p : patches) {
    const bool on_axis_plane = std::abs(p.center.y) <= 1e-12 * spec.focal_distance;
    if (on_axis_plane) {
      // psi = pi sector of an odd-sized ring; it is its own mirror image
      fx_.push_back(p.center.x);
      fy_.push_back(0.0);
      fz_.push_back(p.center.z);
      fw_.push_back(p.area);
    } else if (p.center.y > 0.0) {
      fx_.push_back(p.center.x);
      fy_.push_back(p.center.y);
      fz_.push_back(p.center.z);
      fw_.push_back(2.0 * p.area);
    }
  }
}

Complex ApertureSum::sum(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& z, const std::vector<double>& w,
                         const Vec3& p) const {
  const double k = k_;
  const double* px = x.data();
  const double* py = y.data();
  const double* pz = z.data();
  const double* pw = w.data();
  const std::size_t n = x.size();
  double re = 0.0;
  double im = 0.0;
  double rmin = 1e300;
#pragma omp simd reduction(+ : re, im) reduction(min : rmin)
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = p.x - px[i];
    const double dy = p.y - py[i];
    const double dz = p.z - pz[i];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    rmin = std::min(rmin, r);
    const double a = pw[i] / r;
    double s, c;
    phase_sincos(k * r, s, c);
    re += a * c;
    im += a * s;
  }
  if (!(rmin > 1e-12)) {
    std::ostringstream os;
    os << "field point (" << p.x << ", " << p.y << ", " << p.z << ") m coincides with an aperture patch centre";
    throw Refusal(os.str());
  }
  return prefactor_ * Complex(re, im);
}

Complex ApertureSum::at(const Vec3& point) const { return sum(x_, y_, z_, w_, point); }

Complex ApertureSum::on_meridian(double radius, double z) const {
  return sum(fx_, fy_, fz_, fw_, Vec3{radius, 0.0, z});
}

AxisymmetricField::AxisymmetricField(const TransducerSpec& spec, Element element,
                                     const Medium& medium, std::vector<double> depths,
                                     double max_radius, const FieldOptions& options)
    : depths_(std::move(depths)) {
  const ApertureSum aperture(spec, element, medium, options);
  step_ = resolve(options.radial_step, 0.25 * wavelength(spec, element, medium));
  // two spare nodes past max_radius for the cubic stencil
  nodes_ = static_cast<std::size_t>(std::ceil(max_radius / step_)) + 3;
  table_.assign(depths_.size() * nodes_, Complex{});
  const std::size_t nodes = nodes_;
  parallel_for(table_.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      const std::size_t d = n / nodes;
      const std::size_t i = n % nodes;
      table_[n] = aperture.on_meridian(static_cast<double>(i) * step_, depths_[d]);
    }
  });
}

Complex AxisymmetricField::at(double radius, std::size_t depth_index) const {
  const double u = radius / step_;
  auto i = static_cast<std::size_t>(u);
  if (i + 2 >= nodes_) {
    throw Refusal("AxisymmetricField: radius lies outside the tabulated range");
  }
  const double t = u - static_cast<double>(i);
  const Complex* row = table_.data() + depth_index * nodes_;
  // the field is even in radius, so node -1 mirrors node 1
  const Complex fm = i == 0 ? row[1] : row[i - 1];
  const double wm = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return wm * fm + w0 * row[i] + w1 * row[i + 1] + w2 * row[i + 2];
}

ComplexVolume AxisymmetricField::sample(const Grid3D& grid) const {
  const auto depths = grid_depths(grid);
  if (depths.size() != depths_.size()) {
    throw Refusal("AxisymmetricField: grid depth planes do not match the table");
  }
  for (std::size_t k = 0; k < depths.size(); ++k) {
    if (std::abs(depths[k] - depths_[k]) > 1e-12) {
      throw Refusal("AxisymmetricField: grid depth planes do not match the table");
    }
  }
  ComplexVolume out(grid);
  const std::size_t plane = grid.dims.nx * grid.dims.ny;
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      const auto [i, j, k] = grid.unravel(n);
      const Vec3 p = grid.position(i, j, k);
      out[n] = at(std::hypot(p.x, p.y), n / plane);
    }
  });
  return out;
}

std::vector<double> grid_depths(const Grid3D& grid) {
  std::vector<double> z(grid.dims.nz);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = grid.position(0, 0, k).z;
  return z;
}

double max_lateral_radius(const Grid3D& grid) {
  double best = 0.0;
  for (std::size_t i : {std::size_t{0}, grid.dims.nx - 1}) {
    for (std::size_t j : {std::size_t{0}, grid.dims.ny - 1}) {
      const Vec3 p = grid.position(i, j, 0);
      best = std::max(best, std::hypot(p.x, p.y));
    }
  }
  return best;
}

namespace {

// A voxel can only coincide with a patch centre if it lies on the aperture sphere.
void refuse_voxels_on_patches(const TransducerSpec& spec, Element element, const Medium& medium,
                              const FieldOptions& options, const Grid3D& grid) {
  const double R = spec.focal_distance;
  const double rim = spec.ring_outer_radius;
  const double sag = R - std::sqrt(R * R - rim * rim);
  std::vector<Patch> patches;
  for (std::size_t k = 0; k < grid.dims.nz; ++k) {
    const double z = grid.position(0, 0, k).z;
    if (z > sag + 1e-9) continue;
    for (std::size_t j = 0; j < grid.dims.ny; ++j) {
      for (std::size_t i = 0; i < grid.dims.nx; ++i) {
        const Vec3 v = grid.position(i, j, k);
        if (std::abs((v - Vec3{0.0, 0.0, R}).norm() - R) > 1e-9 * R) continue;
        if (patches.empty()) {
          patches = discretize_aperture(
              spec, element, resolve(options.patch_target, 0.25 * wavelength(spec, element, medium)), medium);
        }
        for (const auto& p : patches) {
          if ((p.center - v).norm() <= 1e-12 * R) {
            std::ostringstream os;
            os << "compute_pressure_field: voxel (" << i << ", " << j << ", " << k << ") at (" << v.x
               << ", " << v.y << ", " << v.z << ") m coincides with an aperture patch centre";
            throw Refusal(os.str());
          }
        }
      }
    }
  }
}

}  // namespace

ComplexVolume compute_pressure_field(const TransducerSpec& spec, Element element,
                                     const Medium& medium, const Grid3D& grid,
                                     const FieldOptions& options) {
  spec.validate();
  medium.validate();
  grid.validate();
  if (grid.origin.z < 0.0) {
    throw Refusal("compute_pressure_field: grid reaches behind the transducer face (z < 0)");
  }
  refuse_voxels_on_patches(spec, element, medium, options, grid);
  const AxisymmetricField field(spec, element, medium, grid_depths(grid), max_lateral_radius(grid), options);
  return field.sample(grid);
}

}  // namespace vatk
