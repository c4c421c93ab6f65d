// Copyright 2026 The polarproj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polarproj/sim.hpp"

#include <Eigen/Geometry>

#include <bit>
#include <cmath>

#include "parallel.hpp"
#include "polarproj/error.hpp"

namespace polarproj {

void SceneSpec::validate() const {
  model.validate();
  if (!(std::isfinite(s0_base) && s0_base > 0.0)) fail(ErrorKind::DomainError, "s0_base: must be > 0");
  if (const auto* plane = std::get_if<PlaneGeometry>(&geometry)) {
    if (std::abs(plane->normal.norm() - 1.0) > 1e-9) fail(ErrorKind::DomainError, "normal: must be unit length");
    if (!(plane->normal.z() < 0.0)) fail(ErrorKind::DomainError, "normal: must face the camera (n_z < 0)");
    if (!(std::isfinite(plane->distance) && plane->distance > 0.0)) fail(ErrorKind::DomainError, "distance: must be > 0");
  } else {
    const auto& s = std::get<UniformStokes>(geometry).stokes;
    if (!(s.s0 > 0.0) || !s.realizable()) fail(ErrorKind::DomainError, "stokes: must be physically realizable with s0 > 0");
  }
}

void NoiseSpec::validate() const {
  if (!(std::isfinite(gaussian_sigma) && gaussian_sigma >= 0.0)) fail(ErrorKind::DomainError, "gaussian_sigma: must be >= 0");
  if (quantization_bits != 0 && (quantization_bits < 8 || quantization_bits > 16))
    fail(ErrorKind::DomainError, "quantization_bits: must be 0 or in 8..16");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_open(std::uint64_t bits) {
  // (0, 1): 53 random bits centred in their cell.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Tilted-polarizer transmission axis built in camera coordinates: orthogonal
/// to the ray and to the absorbing axis, then read off in the local basis.
double transmitted_angle(const RayFrame& frame, double alpha) {
  const Eigen::Vector3d absorbing(std::cos(alpha + kHalfPi), std::sin(alpha + kHalfPi), 0.0);
  const Eigen::Vector3d t = frame.z().cross(absorbing);
  return wrap_pi(std::atan2(t.dot(frame.y()), t.dot(frame.x())));
}

struct PixelTruth {
  StokesVector stokes;
  double aolp = 0.0;
  double dolp = 0.0;
  double zenith = 0.0;
  bool clipped = false;
};

PixelTruth plane_pixel(const SceneSpec& scene, const PlaneGeometry& plane, const RayFrame& frame) {
  const Eigen::Vector3d local = frame.rotation.transpose() * plane.normal;
  if (!(local.z() < 0.0)) fail(ErrorKind::InvisiblePlane, "the plane faces away from at least one pixel ray");
  PixelTruth out;
  out.zenith = std::atan2(std::hypot(local.x(), local.y()), -local.z());
  const double azimuth = std::atan2(local.y(), local.x());
  out.aolp = wrap_pi(azimuth + (scene.mode == ReflectionMode::Diffuse ? kHalfPi : 0.0));
  double rho = dolp_specular(scene.model, out.zenith);
  if (rho < 0.0 || rho > 1.0) {
    rho = std::clamp(rho, 0.0, 1.0);
    out.clipped = true;
  }
  out.dolp = rho;
  out.stokes = {scene.s0_base, scene.s0_base * rho * std::cos(2.0 * out.aolp),
                scene.s0_base * rho * std::sin(2.0 * out.aolp), 0.0};
  return out;
}

PixelTruth uniform_pixel(const UniformStokes& uniform) {
  PixelTruth out;
  out.stokes = uniform.stokes;
  out.dolp = std::hypot(uniform.stokes.s1, uniform.stokes.s2) / uniform.stokes.s0;
  out.aolp = (uniform.stokes.s1 == 0.0 && uniform.stokes.s2 == 0.0) ? 0.0 : aolp(uniform.stokes);
  return out;
}

double render_sample(const PixelTruth& truth, double eff_angle, const SceneSpec& scene, const NoiseSpec& noise,
                     std::uint64_t pixel, double nominal) {
  double value = intensity_through_polarizer(truth.stokes, eff_angle);
  if (noise.gaussian_sigma > 0.0) {
    const auto key = std::bit_cast<std::uint64_t>(wrap_pi(nominal));
    value += noise.gaussian_sigma * scene.s0_base * keyed_gaussian(noise.seed, pixel, key);
  }
  value = std::max(0.0, value);
  if (noise.quantization_bits > 0) {
    const double levels = std::ldexp(1.0, noise.quantization_bits) - 1.0;
    value = std::round(std::min(value / scene.s0_base, 1.0) * levels) / levels * scene.s0_base;
  }
  return value;
}

}  // namespace

double keyed_gaussian(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t k = splitmix64(seed ^ splitmix64(a ^ splitmix64(b)));
  const double u1 = unit_open(splitmix64(k));
  const double u2 = unit_open(splitmix64(k ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Simulation simulate_capture(const SceneSpec& scene, const RayFrameField& frames, const SensorSpec& sensor,
                            const NoiseSpec& noise) {
  scene.validate();
  noise.validate();
  const int width = frames.width();
  const int height = frames.height();
  const std::size_t count = frames.pixel_count();

  Simulation sim;
  GroundTruth& gt = sim.truth;
  gt.width = width;
  gt.height = height;
  gt.stokes.resize(count);
  gt.normals.assign(count, Eigen::Vector3d::Zero());
  gt.aolp.resize(count);
  gt.dolp.resize(count);
  gt.zenith.assign(count, 0.0);
  gt.visible.assign(count, 1);
  gt.clipped.assign(count, 0);
  const auto* plane = std::get_if<PlaneGeometry>(&scene.geometry);
  gt.has_normals = plane != nullptr;

  const auto* layout = std::get_if<MosaicLayout>(&sensor);
  std::vector<double> angles = layout ? layout->angles() : std::get<MultishotSensor>(sensor).angles;
  if (layout) layout->validate();
  const std::size_t shots = layout ? 1 : angles.size();
  if (shots == 0) fail(ErrorKind::DomainError, "sensor: no polarizer angles");
  std::vector<Image> images(shots, Image(width, height));

  detail::parallel_rows(height, [&](int begin, int end) {
    for (int v = begin; v < end; ++v) {
      for (int u = 0; u < width; ++u) {
        const std::size_t j = static_cast<std::size_t>(v) * width + u;
        const RayFrame frame = frames.at(u, v);
        const PixelTruth truth = plane ? plane_pixel(scene, *plane, frame) : uniform_pixel(std::get<UniformStokes>(scene.geometry));
        gt.stokes[j] = truth.stokes;
        gt.aolp[j] = truth.aolp;
        gt.dolp[j] = truth.dolp;
        gt.zenith[j] = truth.zenith;
        gt.clipped[j] = truth.clipped ? 1 : 0;
        if (plane) gt.normals[j] = plane->normal;
        auto eff = [&](double alpha) { return frames.orthographic_model() ? wrap_pi(alpha) : transmitted_angle(frame, alpha); };
        if (layout) {
          const double alpha = layout->angle_at(u, v);
          images[0].data[j] = render_sample(truth, eff(alpha), scene, noise, j, alpha);
        } else {
          for (std::size_t i = 0; i < shots; ++i) {
            images[i].data[j] = render_sample(truth, eff(angles[i]), scene, noise, j, angles[i]);
          }
        }
      }
    }
  });

  if (layout) {
    sim.capture = RawCapture::mosaic(std::move(images.front()), *layout);
  } else {
    sim.capture = RawCapture::multishot(std::move(images), angles);
  }
  return sim;
}

Simulation simulate_capture(const SceneSpec& scene, const Intrinsics& k, const SensorSpec& sensor, const NoiseSpec& noise) {
  return simulate_capture(scene, RayFrameField::projective(k, RayFrameField::Storage::Lazy), sensor, noise);
}

ExpectedAolp render_expected_aolp(const SceneSpec& scene, const Intrinsics& k, AolpModel model) {
  scene.validate();
  const auto* plane = std::get_if<PlaneGeometry>(&scene.geometry);
  if (!plane) fail(ErrorKind::DomainError, "expected AoLP maps need a plane scene");
  const double offset = scene.mode == ReflectionMode::Diffuse ? kHalfPi : 0.0;
  const auto frames = RayFrameField::projective(k, RayFrameField::Storage::Lazy);
  ExpectedAolp out;
  out.aolp.resize(frames.pixel_count());
  out.visible.assign(frames.pixel_count(), 1);
  const double ortho = wrap_pi(std::atan2(plane->normal.y(), plane->normal.x()) + offset);
  detail::parallel_rows(k.height, [&](int begin, int end) {
    for (int v = begin; v < end; ++v) {
      for (int u = 0; u < k.width; ++u) {
        const std::size_t j = static_cast<std::size_t>(v) * k.width + u;
        const RayFrame frame = frames.at(u, v);
        const Eigen::Vector3d local = frame.rotation.transpose() * plane->normal;
        if (!(local.z() < 0.0)) fail(ErrorKind::InvisiblePlane, "the plane faces away from at least one pixel ray");
        out.aolp[j] = model == AolpModel::Orthographic ? ortho : wrap_pi(std::atan2(local.y(), local.x()) + offset);
      }
    }
  });
  return out;
}

}  // namespace polarproj
