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

#include "polarproj/rayframes.hpp"

#include <Eigen/Geometry>

#include <cmath>

#include "parallel.hpp"
#include "polarproj/error.hpp"
#include "polarproj/polcore.hpp"

namespace polarproj {

void Intrinsics::validate() const {
  if (!(std::isfinite(fx) && fx > 0.0)) fail(ErrorKind::DomainError, "fx: must be > 0");
  if (!(std::isfinite(fy) && fy > 0.0)) fail(ErrorKind::DomainError, "fy: must be > 0");
  if (!std::isfinite(cx)) fail(ErrorKind::DomainError, "cx: must be finite");
  if (!std::isfinite(cy)) fail(ErrorKind::DomainError, "cy: must be finite");
  if (!std::isfinite(skew)) fail(ErrorKind::DomainError, "skew: must be finite");
  if (width <= 0) fail(ErrorKind::DomainError, "width: must be > 0");
  if (height <= 0) fail(ErrorKind::DomainError, "height: must be > 0");
  if (pixel_offset != 0.0 && pixel_offset != 0.5) fail(ErrorKind::DomainError, "pixel_offset: must be 0.0 or 0.5");
}

Eigen::Vector3d backproject(const Intrinsics& k, const Eigen::Vector2d& pixel) {
  if (!(std::isfinite(k.fx) && std::isfinite(k.fy)) || k.fx == 0.0 || k.fy == 0.0 || !std::isfinite(k.skew))
    fail(ErrorKind::SingularIntrinsics, "intrinsic matrix is not invertible");
  // Closed-form inverse of the upper-triangular K.
  const double y = (pixel.y() - k.cy) / k.fy;
  const double x = (pixel.x() - k.cx - k.skew * y) / k.fx;
  return Eigen::Vector3d(x, y, 1.0).normalized();
}

RayFrame local_frame(const Eigen::Vector3d& ray) {
  // (0, 1, 0) x ray = (ray.z, 0, -ray.x)
  const double norm = std::hypot(ray.z(), ray.x());
  if (norm < 1e-12) fail(ErrorKind::DegenerateRay, "ray is parallel to the camera y-axis");
  const Eigen::Vector3d rx(ray.z() / norm, 0.0, -ray.x() / norm);
  const Eigen::Vector3d ry = ray.cross(rx);
  RayFrame frame;
  frame.rotation.col(0) = rx;
  frame.rotation.col(1) = ry;
  frame.rotation.col(2) = ray;
  return frame;
}

double effective_angle(const RayFrame& frame, double alpha) {
  // Absorbing axis (cos(alpha + pi/2), sin(alpha + pi/2), 0) in the local frame.
  const Eigen::Vector3d absorbing(-std::sin(alpha), std::cos(alpha), 0.0);
  const Eigen::Vector3d local = frame.rotation.transpose() * absorbing;
  // z x local = (-local.y, local.x, 0)
  const double tx = -local.y();
  const double ty = local.x();
  if (std::hypot(tx, ty) < 1e-12) fail(ErrorKind::DegeneratePolarizer, "absorbing axis is parallel to the ray");
  return wrap_pi(std::atan2(ty, tx));
}

RayFrameField RayFrameField::projective(const Intrinsics& k, Storage storage) {
  // Probe once so that singular intrinsics fail here rather than on access.
  (void)backproject(k, k.pixel_center(0, 0));
  k.validate();
  RayFrameField field(k, Kind::Projective);
  if (storage == Storage::Dense) {
    field.dense_.resize(field.pixel_count());
    detail::parallel_rows(k.height, [&](int begin, int end) {
      for (int v = begin; v < end; ++v) {
        for (int u = 0; u < k.width; ++u) {
          field.dense_[static_cast<std::size_t>(v) * static_cast<std::size_t>(k.width) + static_cast<std::size_t>(u)] =
              local_frame(backproject(k, k.pixel_center(u, v))).rotation;
        }
      }
    });
  }
  return field;
}

RayFrameField RayFrameField::orthographic(const Intrinsics& k) {
  k.validate();
  return RayFrameField(k, Kind::Orthographic);
}

RayFrame RayFrameField::at(int u, int v) const {
  if (kind_ == Kind::Orthographic) return RayFrame{};
  if (!dense_.empty()) {
    return RayFrame{dense_[static_cast<std::size_t>(v) * static_cast<std::size_t>(k_.width) + static_cast<std::size_t>(u)]};
  }
  return local_frame(backproject(k_, k_.pixel_center(u, v)));
}

RayFrameField build_frame_field(const Intrinsics& k) { return RayFrameField::projective(k); }

int EffectiveAngleField::find(double alpha) const {
  for (std::size_t i = 0; i < nominal.size(); ++i) {
    if (axial_distance(nominal[i], alpha) < 1e-9) return static_cast<int>(i);
  }
  return -1;
}

EffectiveAngleField build_effective_angles(const RayFrameField& field, std::span<const double> angles) {
  if (angles.empty()) fail(ErrorKind::DomainError, "angles: at least one nominal angle is required");
  EffectiveAngleField out;
  out.intrinsics = field.intrinsics();
  out.nominal.assign(angles.begin(), angles.end());
  const std::size_t n = angles.size();
  out.values.resize(field.pixel_count() * n);
  const int width = field.width();
  detail::parallel_rows(field.height(), [&](int begin, int end) {
    for (int v = begin; v < end; ++v) {
      for (int u = 0; u < width; ++u) {
        const std::size_t pixel = static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u);
        const RayFrame frame = field.at(u, v);
        for (std::size_t i = 0; i < n; ++i) {
          out.values[pixel * n + i] = field.orthographic_model() ? wrap_pi(angles[i]) : effective_angle(frame, angles[i]);
        }
      }
    }
  });
  return out;
}

}  // namespace polarproj
