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

// Forward renderer for raw polarimetric captures through the tilted-polarizer
// projective model, with per-pixel ground truth.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <variant>
#include <vector>

#include "polarproj/sfp.hpp"
#include "polarproj/stokes.hpp"

namespace polarproj {

struct PlaneGeometry {
  Eigen::Vector3d normal = Eigen::Vector3d(0, 0, -1);  // camera frame, unit, n_z < 0
  double distance = 1.0;
};

/// The same Stokes vector at every pixel, in each pixel's local frame.
struct UniformStokes {
  StokesVector stokes{1.0, 0.0, 0.0, 0.0};
};

struct SceneSpec {
  std::variant<PlaneGeometry, UniformStokes> geometry = PlaneGeometry{};
  ReflectionMode mode = ReflectionMode::Specular;
  SpecularDolpModel model;
  double s0_base = 1.0;

  void validate() const;  // DomainError
};

struct NoiseSpec {
  double gaussian_sigma = 0.0;  // fraction of s0_base
  int quantization_bits = 0;    // 0 = off, else 8..16
  std::uint64_t seed = 0;

  void validate() const;  // DomainError
};

struct MultishotSensor {
  std::vector<double> angles;  // radians
};

using SensorSpec = std::variant<MosaicLayout, MultishotSensor>;

struct GroundTruth {
  int width = 0;
  int height = 0;
  std::vector<StokesVector> stokes;      // local frame
  std::vector<Eigen::Vector3d> normals;  // camera frame (zero for uniform scenes)
  std::vector<double> aolp;              // local frame, [0, pi); 0 where unpolarized
  std::vector<double> dolp;
  std::vector<double> zenith;            // radians, plane scenes only
  std::vector<std::uint8_t> visible;
  std::vector<std::uint8_t> clipped;     // DoLP clipped to [0, 1]
  bool has_normals = false;
};

struct Simulation {
  RawCapture capture;
  GroundTruth truth;
};

/// Renders the scene. Frames come from `frames` (projective or orthographic).
/// Throws InvisiblePlane if the plane faces away from any pixel ray.
Simulation simulate_capture(const SceneSpec& scene, const RayFrameField& frames, const SensorSpec& sensor,
                            const NoiseSpec& noise = {});
Simulation simulate_capture(const SceneSpec& scene, const Intrinsics& k, const SensorSpec& sensor,
                            const NoiseSpec& noise = {});

enum class AolpModel { Orthographic, Projective };

struct ExpectedAolp {
  std::vector<double> aolp;  // [0, pi)
  std::vector<std::uint8_t> visible;
};

/// Model-predicted AoLP: the azimuth of the camera-frame normal everywhere
/// (orthographic) or the azimuth of R_j^T n per pixel (projective), plus
/// pi/2 in diffuse mode. Throws DomainError for non-plane scenes.
ExpectedAolp render_expected_aolp(const SceneSpec& scene, const Intrinsics& k, AolpModel model);

/// Counter-based standard normal sample keyed by (seed, a, b).
double keyed_gaussian(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace polarproj
