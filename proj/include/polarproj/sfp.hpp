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

// Surface normals from polarization: zenith from specular DoLP, azimuth from
// AoLP, local-to-camera rotation, plane fitting and error metrics.
//
// A normal facing the camera has a negative z component in its frame. The
// zenith is the angle between the normal and the reversed viewing ray, so in
// a local frame cos(theta) = -n.z; the azimuth is atan2(n.y, n.x) in the same
// frame and, for specular reflection, equals the AoLP.

#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "polarproj/rayframes.hpp"
#include "polarproj/stokes.hpp"

namespace polarproj {

/// rho(theta) = a * 2 sin^2 cos sqrt(n^2 - sin^2) / (n^2 - sin^2 - n^2 sin^2 + 2 sin^4).
struct SpecularDolpModel {
  double n = 1.5;  // refractive index, > 1
  double a = 1.0;  // scale, (0, 1]

  void validate() const;  // DomainError
  /// Zenith of the DoLP peak (Brewster angle atan n).
  double peak_zenith() const;
  double peak_dolp() const;
};

/// Throws DomainError unless 0 <= theta < pi/2.
double dolp_specular(const SpecularDolpModel& model, double theta);

enum class ZenithBranch { Low, High };

struct ZenithSolution {
  double theta = 0.0;
  bool clamped = false;  // rho exceeded the peak; theta is the peak zenith
};

/// Inverts dolp_specular on one monotonic branch. Throws NoSolution for rho < 0.
ZenithSolution zenith_from_dolp(const SpecularDolpModel& model, double rho, ZenithBranch branch);

enum class ReflectionMode { Specular, Diffuse };

/// Pixels whose DoLP is below this are masked from azimuth-dependent work.
inline constexpr double kMinDolp = 0.005;

/// Unit normal from spherical angles in a frame: (sin t cos p, sin t sin p, -cos t).
Eigen::Vector3d normal_from_angles(double zenith, double azimuth);

struct AmbiguityCandidateSet {
  int width = 0;
  int height = 0;
  int per_pixel = 0;  // 4 (specular) or 8 (diffuse)
  FrameConvention frame = FrameConvention::Local;
  std::vector<Eigen::Vector3d> normals;  // normals[pixel * per_pixel + k]
  std::vector<std::uint8_t> valid;

  std::size_t pixel_count() const { return valid.size(); }
  std::span<const Eigen::Vector3d> at(std::size_t pixel) const {
    return std::span<const Eigen::Vector3d>(normals).subspan(pixel * static_cast<std::size_t>(per_pixel),
                                                             static_cast<std::size_t>(per_pixel));
  }
};

struct NormalField {
  int width = 0;
  int height = 0;
  FrameConvention frame = FrameConvention::Camera;
  std::vector<Eigen::Vector3d> normals;
  std::vector<std::uint8_t> valid;

  std::size_t pixel_count() const { return valid.size(); }
};

/// Candidate normals per pixel, in the map's frame. Candidate k is
/// azimuth[k / 2] with the low (even k) or high (odd k) zenith branch, where
/// azimuths are {phi, phi + pi} and, in diffuse mode, also {phi + pi/2, phi - pi/2}.
/// Pixels that are unusable or have DoLP < kMinDolp are masked.
AmbiguityCandidateSet normals_local(const StokesMap& map, const SpecularDolpModel& model, ReflectionMode mode);

/// Multiplies every normal by R_j. Throws FrameMismatch for camera-frame input
/// and DomainError on a size mismatch.
AmbiguityCandidateSet rotate_normals_to_camera(AmbiguityCandidateSet candidates, const RayFrameField& frames);
NormalField rotate_normals_to_camera(NormalField field, const RayFrameField& frames);

/// Per pixel, the candidate closest (great-circle) to the ground truth.
/// Throws FrameMismatch when frames differ and DomainError on size mismatch.
NormalField oracle_disambiguate(const AmbiguityCandidateSet& candidates, const NormalField& truth);
NormalField oracle_disambiguate(const AmbiguityCandidateSet& candidates, const Eigen::Vector3d& truth);

/// Picks candidate `index` at every valid pixel (no oracle available).
NormalField select_candidate(const AmbiguityCandidateSet& candidates, int index);

struct PlaneEstimate {
  Eigen::Vector3d normal = Eigen::Vector3d(0, 0, -1);  // camera frame, n_z < 0
  double residual = 0.0;  // smallest singular value / sqrt(count)
  std::size_t count = 0;
};

/// Plane normal from per-pixel AoLP (specular convention, local frames): each
/// pixel contributes the row (sin phi, -cos phi, 0) R_j^T. The rows are folded
/// into a 3x3 triangular factor, whose SVD gives the null direction.
/// Throws EmptyMask below 3 pixels and DegenerateSystem when the two smallest
/// singular values are within 1e-9 (relative to the largest) of each other.
/// Optional `weights` scale each pixel's constraint row (empty = all 1).
PlaneEstimate estimate_plane_normal(std::span<const double> aolp, const RayFrameField& frames,
                                    std::span<const std::uint8_t> mask, std::span<const double> weights = {});

enum class AngleAmbiguity { None, Pi, PiAndHalfPi };

struct ErrorStats {
  double mae_deg = 0.0;
  double rmse_deg = 0.0;
  double std_deg = 0.0;  // population standard deviation
  std::size_t count = 0;
};

/// Per-pixel angle errors in radians, folded by the ambiguity (None: circular
/// mod 2pi; Pi: mod pi; PiAndHalfPi: mod pi/2).
double angle_error(double estimate, double truth, AngleAmbiguity ambiguity);
/// Great-circle error in radians, minimised over azimuth rotations about the
/// frame z-axis by pi (Pi) or multiples of pi/2 (PiAndHalfPi).
double normal_error(const Eigen::Vector3d& estimate, const Eigen::Vector3d& truth, AngleAmbiguity ambiguity);

/// Aggregates errors (radians) into degree statistics. Throws EmptyMask.
ErrorStats summarize_errors(std::span<const double> errors_rad);

/// Throws DomainError on shape mismatch and EmptyMask when nothing is selected.
ErrorStats angular_error_stats(std::span<const double> estimate, std::span<const double> truth,
                               std::span<const std::uint8_t> mask, AngleAmbiguity ambiguity);
ErrorStats angular_error_stats(const NormalField& estimate, const NormalField& truth, AngleAmbiguity ambiguity);

/// Fits (n, a) to (zenith, dolp) samples: grid over n with the closed-form
/// optimal a, then golden-section refinement of n.
SpecularDolpModel fit_specular_model(std::span<const std::pair<double, double>> zenith_dolp);

}  // namespace polarproj
