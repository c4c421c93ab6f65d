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

// Per-pixel local ray frames and tilted-polarizer effective angles.

#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace polarproj {

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;
  int width = 1;
  int height = 1;
  /// Sub-pixel position of the sample point inside each cell: pixel (u, v)
  /// back-projects through (u + pixel_offset, v + pixel_offset).
  double pixel_offset = 0.0;

  /// Throws DomainError naming the offending field.
  void validate() const;

  Eigen::Vector2d pixel_center(int u, int v) const { return {u + pixel_offset, v + pixel_offset}; }
};

/// Orthonormal basis attached to one pixel. Columns of `rotation` are
/// (r_x, r_y, r_z); it maps local coordinates to camera coordinates.
struct RayFrame {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  Eigen::Vector3d x() const { return rotation.col(0); }
  Eigen::Vector3d y() const { return rotation.col(1); }
  Eigen::Vector3d z() const { return rotation.col(2); }
};

/// Unit ray K^-1 (u, v, 1)^T / |.| for real pixel coordinates.
/// Throws SingularIntrinsics if fx or fy is zero or non-finite.
Eigen::Vector3d backproject(const Intrinsics& k, const Eigen::Vector2d& pixel);

/// r_x = normalize(y_cam x ray), r_y = ray x r_x, r_z = ray.
/// Throws DegenerateRay when the ray is parallel to the camera y-axis.
RayFrame local_frame(const Eigen::Vector3d& ray);

/// Effective transmission angle, in the local frame, of a polarizer lying in
/// the image plane at nominal angle `alpha`. Result in [0, pi).
/// Throws DegeneratePolarizer when the absorbing axis is parallel to the ray.
double effective_angle(const RayFrame& frame, double alpha);

/// Dense (or recomputed-on-access) field of per-pixel frames.
class RayFrameField {
 public:
  enum class Storage { Dense, Lazy };

  /// Frames from back-projected rays. Throws SingularIntrinsics.
  static RayFrameField projective(const Intrinsics& k, Storage storage = Storage::Dense);
  /// Every frame is the identity: the orthographic baseline.
  static RayFrameField orthographic(const Intrinsics& k);

  const Intrinsics& intrinsics() const { return k_; }
  int width() const { return k_.width; }
  int height() const { return k_.height; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(k_.width) * static_cast<std::size_t>(k_.height); }
  bool orthographic_model() const { return kind_ == Kind::Orthographic; }
  bool dense() const { return !dense_.empty(); }

  RayFrame at(int u, int v) const;
  RayFrame at(std::size_t index) const {
    return at(static_cast<int>(index % static_cast<std::size_t>(k_.width)),
              static_cast<int>(index / static_cast<std::size_t>(k_.width)));
  }

 private:
  enum class Kind { Projective, Orthographic };
  RayFrameField(const Intrinsics& k, Kind kind) : k_(k), kind_(kind) {}

  Intrinsics k_;
  Kind kind_;
  std::vector<Eigen::Matrix3d> dense_;
};

RayFrameField build_frame_field(const Intrinsics& k);

/// alpha_hat for every pixel and nominal angle, stored pixel-major.
struct EffectiveAngleField {
  Intrinsics intrinsics;
  std::vector<double> nominal;  // radians
  std::vector<double> values;   // values[pixel * nominal.size() + i]

  int width() const { return intrinsics.width; }
  int height() const { return intrinsics.height; }
  double at(std::size_t pixel, std::size_t i) const { return values[pixel * nominal.size() + i]; }
  std::span<const double> at(std::size_t pixel) const {
    return std::span<const double>(values).subspan(pixel * nominal.size(), nominal.size());
  }
  /// Index of `alpha` in `nominal` (axial distance < 1e-9), or -1.
  int find(double alpha) const;
};

/// Throws DomainError on an empty angle list; propagates DegeneratePolarizer.
EffectiveAngleField build_effective_angles(const RayFrameField& field, std::span<const double> angles);

}  // namespace polarproj
