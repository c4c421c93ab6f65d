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

#include "polarproj/sfp.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "polarproj/error.hpp"

namespace polarproj {

namespace {

double specular_curve(double n, double a, double theta) {
  const double s = std::sin(theta);
  const double s2 = s * s;
  const double n2 = n * n;
  const double num = 2.0 * s2 * std::cos(theta) * std::sqrt(n2 - s2);
  const double den = n2 - s2 - n2 * s2 + 2.0 * s2 * s2;
  return a * num / den;
}

}  // namespace

void SpecularDolpModel::validate() const {
  if (!(std::isfinite(n) && n > 1.0)) fail(ErrorKind::DomainError, "n: refractive index must be > 1");
  if (!(std::isfinite(a) && a > 0.0 && a <= 1.0)) fail(ErrorKind::DomainError, "a: scale must be in (0, 1]");
}

double SpecularDolpModel::peak_zenith() const { return std::atan(n); }

double SpecularDolpModel::peak_dolp() const { return specular_curve(n, a, peak_zenith()); }

double dolp_specular(const SpecularDolpModel& model, double theta) {
  if (!(theta >= 0.0 && theta < kHalfPi)) fail(ErrorKind::DomainError, "zenith must lie in [0, pi/2)");
  return specular_curve(model.n, model.a, theta);
}

ZenithSolution zenith_from_dolp(const SpecularDolpModel& model, double rho, ZenithBranch branch) {
  if (!(rho >= 0.0)) fail(ErrorKind::NoSolution, "DoLP must be >= 0");
  const double peak = model.peak_zenith();
  const double top = specular_curve(model.n, model.a, peak);
  if (rho >= top) return {peak, rho > top};
  if (rho == 0.0) return {branch == ZenithBranch::Low ? 0.0 : kHalfPi, false};

  // g(theta) = rho(theta) - rho with g(lo) < 0 < g(hi); on the high branch lo > hi.
  double lo = branch == ZenithBranch::Low ? 0.0 : peak;
  double hi = branch == ZenithBranch::Low ? peak : kHalfPi;
  if (branch == ZenithBranch::High) std::swap(lo, hi);  // lo: rho(lo) < rho, hi: rho(hi) > rho
  auto g = [&](double t) { return specular_curve(model.n, model.a, t) - rho; };
  double glo = -rho;
  double ghi = top - rho;
  int side = 0;
  double theta = 0.5 * (lo + hi);
  // Illinois-modified regula falsi with a bisection fallback.
  for (int it = 0; it < 200; ++it) {
    theta = it < 100 ? (lo * ghi - hi * glo) / (ghi - glo) : 0.5 * (lo + hi);
    if (!(std::min(lo, hi) <= theta && theta <= std::max(lo, hi))) theta = 0.5 * (lo + hi);
    const double gt = g(theta);
    if (gt == 0.0 || std::abs(gt) <= 1e-15 || std::abs(hi - lo) <= 1e-15) break;
    if (gt > 0.0) {
      hi = theta;
      ghi = gt;
      if (side == 1) glo *= 0.5;
      side = 1;
    } else {
      lo = theta;
      glo = gt;
      if (side == -1) ghi *= 0.5;
      side = -1;
    }
  }
  return {theta, false};
}

Eigen::Vector3d normal_from_angles(double zenith, double azimuth) {
  const double st = std::sin(zenith);
  return Eigen::Vector3d(st * std::cos(azimuth), st * std::sin(azimuth), -std::cos(zenith)).normalized();
}

AmbiguityCandidateSet normals_local(const StokesMap& map, const SpecularDolpModel& model, ReflectionMode mode) {
  model.validate();
  AmbiguityCandidateSet out;
  out.width = map.width();
  out.height = map.height();
  out.per_pixel = mode == ReflectionMode::Specular ? 4 : 8;
  out.frame = map.frame;
  const std::size_t count = map.pixel_count();
  out.normals.assign(count * static_cast<std::size_t>(out.per_pixel), Eigen::Vector3d::Zero());
  out.valid.assign(count, 0);
  const int width = map.width();
  detail::parallel_rows(map.height(), [&](int begin, int end) {
    for (std::size_t j = static_cast<std::size_t>(begin) * width; j < static_cast<std::size_t>(end) * width; ++j) {
      const auto& s = map.stokes[j];
      if (!usable(map.status[j]) || !(s.s0 > 0.0)) continue;
      const double rho = std::min(1.0, std::hypot(s.s1, s.s2) / s.s0);
      if (rho < kMinDolp) continue;
      const double phi = 0.5 * std::atan2(s.s2, s.s1);
      const double low = zenith_from_dolp(model, rho, ZenithBranch::Low).theta;
      const double high = zenith_from_dolp(model, rho, ZenithBranch::High).theta;
      const std::array<double, 4> azimuths = {phi, phi + kPi, phi + kHalfPi, phi - kHalfPi};
      auto* dst = &out.normals[j * static_cast<std::size_t>(out.per_pixel)];
      for (int k = 0; k < out.per_pixel; k += 2) {
        dst[k] = normal_from_angles(low, azimuths[static_cast<std::size_t>(k / 2)]);
        dst[k + 1] = normal_from_angles(high, azimuths[static_cast<std::size_t>(k / 2)]);
      }
      out.valid[j] = 1;
    }
  });
  return out;
}

namespace {

void check_frames(int width, int height, const RayFrameField& frames) {
  if (width != frames.width() || height != frames.height())
    fail(ErrorKind::DomainError, "normal field and frame field sizes differ");
}

}  // namespace

AmbiguityCandidateSet rotate_normals_to_camera(AmbiguityCandidateSet candidates, const RayFrameField& frames) {
  if (candidates.frame != FrameConvention::Local) fail(ErrorKind::FrameMismatch, "candidates are already in the camera frame");
  check_frames(candidates.width, candidates.height, frames);
  const auto per = static_cast<std::size_t>(candidates.per_pixel);
  detail::parallel_rows(candidates.height, [&](int begin, int end) {
    for (int v = begin; v < end; ++v) {
      for (int u = 0; u < candidates.width; ++u) {
        const std::size_t j = static_cast<std::size_t>(v) * candidates.width + u;
        if (!candidates.valid[j]) continue;
        const Eigen::Matrix3d r = frames.at(u, v).rotation;
        for (std::size_t k = 0; k < per; ++k) candidates.normals[j * per + k] = r * candidates.normals[j * per + k];
      }
    }
  });
  candidates.frame = FrameConvention::Camera;
  return candidates;
}

NormalField rotate_normals_to_camera(NormalField field, const RayFrameField& frames) {
  if (field.frame != FrameConvention::Local) fail(ErrorKind::FrameMismatch, "normals are already in the camera frame");
  check_frames(field.width, field.height, frames);
  for (int v = 0; v < field.height; ++v) {
    for (int u = 0; u < field.width; ++u) {
      const std::size_t j = static_cast<std::size_t>(v) * field.width + u;
      if (field.valid[j]) field.normals[j] = frames.at(u, v).rotation * field.normals[j];
    }
  }
  field.frame = FrameConvention::Camera;
  return field;
}

namespace {

double great_circle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

template <class TruthAt>
NormalField pick_closest(const AmbiguityCandidateSet& candidates, const TruthAt& truth_at) {
  NormalField out;
  out.width = candidates.width;
  out.height = candidates.height;
  out.frame = candidates.frame;
  out.normals.assign(candidates.pixel_count(), Eigen::Vector3d::Zero());
  out.valid.assign(candidates.pixel_count(), 0);
  for (std::size_t j = 0; j < candidates.pixel_count(); ++j) {
    const Eigen::Vector3d* truth = truth_at(j);
    if (!candidates.valid[j] || truth == nullptr) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates.at(j)) {
      const double e = great_circle(c, *truth);
      if (e < best) {
        best = e;
        out.normals[j] = c;
      }
    }
    out.valid[j] = 1;
  }
  return out;
}

}  // namespace

NormalField oracle_disambiguate(const AmbiguityCandidateSet& candidates, const NormalField& truth) {
  if (truth.frame != candidates.frame) fail(ErrorKind::FrameMismatch, "candidates and ground truth use different frames");
  if (truth.pixel_count() != candidates.pixel_count()) fail(ErrorKind::DomainError, "ground truth size differs");
  return pick_closest(candidates, [&](std::size_t j) { return truth.valid[j] ? &truth.normals[j] : nullptr; });
}

NormalField oracle_disambiguate(const AmbiguityCandidateSet& candidates, const Eigen::Vector3d& truth) {
  return pick_closest(candidates, [&](std::size_t) { return &truth; });
}

NormalField select_candidate(const AmbiguityCandidateSet& candidates, int index) {
  if (index < 0 || index >= candidates.per_pixel) fail(ErrorKind::DomainError, "candidate index out of range");
  NormalField out;
  out.width = candidates.width;
  out.height = candidates.height;
  out.frame = candidates.frame;
  out.valid = candidates.valid;
  out.normals.assign(candidates.pixel_count(), Eigen::Vector3d::Zero());
  for (std::size_t j = 0; j < candidates.pixel_count(); ++j) {
    if (candidates.valid[j]) out.normals[j] = candidates.at(j)[static_cast<std::size_t>(index)];
  }
  return out;
}

PlaneEstimate estimate_plane_normal(std::span<const double> aolp, const RayFrameField& frames,
                                    std::span<const std::uint8_t> mask, std::span<const double> weights) {
  if (aolp.size() != frames.pixel_count() || mask.size() != frames.pixel_count())
    fail(ErrorKind::DomainError, "AoLP map, mask and frame field sizes differ");
  if (!weights.empty() && weights.size() != aolp.size()) fail(ErrorKind::DomainError, "weights size differs from the AoLP map");
  // Streaming Givens QR: r stays upper triangular with r^T r = A^T A.
  Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
  Eigen::Vector3d ray_sum = Eigen::Vector3d::Zero();
  std::size_t count = 0;
  for (std::size_t j = 0; j < aolp.size(); ++j) {
    if (!mask[j] || !std::isfinite(aolp[j])) continue;
    if (!weights.empty() && !(weights[j] > 0.0)) continue;
    const RayFrame frame = frames.at(j);
    ray_sum += frame.z();
    Eigen::Vector3d w = frame.rotation * Eigen::Vector3d(std::sin(aolp[j]), -std::cos(aolp[j]), 0.0);
    if (!weights.empty()) w *= weights[j];
    for (int i = 0; i < 3; ++i) {
      if (w[i] == 0.0) continue;
      const double h = std::hypot(r(i, i), w[i]);
      const double c = r(i, i) / h;
      const double s = w[i] / h;
      r(i, i) = h;
      for (int k = i + 1; k < 3; ++k) {
        const double t = c * r(i, k) + s * w[k];
        w[k] = -s * r(i, k) + c * w[k];
        r(i, k) = t;
      }
      w[i] = 0.0;
    }
    ++count;
  }
  if (count < 3) fail(ErrorKind::EmptyMask, "plane fitting needs at least 3 masked pixels");
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullV);
  const Eigen::Vector3d sigma = svd.singularValues();
  if (!(sigma[0] > 0.0) || (sigma[1] - sigma[2]) < 1e-9 * sigma[0])
    fail(ErrorKind::DegenerateSystem,
         "plane normal is not identifiable: the constraint system is rank-deficient");
  // Each row is orthogonal to its own ray. When all rays coincide the shared
  // direction is in the null space whatever the data: the tilt is unobservable.
  const Eigen::Vector3d mean_ray = ray_sum.normalized();
  if ((r * mean_ray).norm() < 1e-9 * sigma[0])
    fail(ErrorKind::DegenerateSystem,
         "plane normal is under-determined: all rays are parallel (orthographic frames), so the tilt along the "
         "viewing direction is unobservable");
  Eigen::Vector3d n = svd.matrixV().col(2).normalized();
  const bool flip = n.z() > 0.0 || (n.z() == 0.0 && (n.x() < 0.0 || (n.x() == 0.0 && n.y() < 0.0)));
  if (flip) n = -n;
  PlaneEstimate out;
  out.normal = n;
  out.count = count;
  out.residual = sigma[2] / std::sqrt(static_cast<double>(count));
  return out;
}

double angle_error(double estimate, double truth, AngleAmbiguity ambiguity) {
  const double period = ambiguity == AngleAmbiguity::None ? 2.0 * kPi : ambiguity == AngleAmbiguity::Pi ? kPi : kHalfPi;
  double d = std::fmod(std::abs(estimate - truth), period);
  return std::min(d, period - d);
}

double normal_error(const Eigen::Vector3d& estimate, const Eigen::Vector3d& truth, AngleAmbiguity ambiguity) {
  double best = great_circle(estimate, truth);
  if (ambiguity != AngleAmbiguity::None) {
    best = std::min(best, great_circle(Eigen::Vector3d(-estimate.x(), -estimate.y(), estimate.z()), truth));
  }
  if (ambiguity == AngleAmbiguity::PiAndHalfPi) {
    best = std::min(best, great_circle(Eigen::Vector3d(-estimate.y(), estimate.x(), estimate.z()), truth));
    best = std::min(best, great_circle(Eigen::Vector3d(estimate.y(), -estimate.x(), estimate.z()), truth));
  }
  return best;
}

ErrorStats summarize_errors(std::span<const double> errors_rad) {
  if (errors_rad.empty()) fail(ErrorKind::EmptyMask, "no pixels selected for error statistics");
  constexpr double kDeg = 180.0 / kPi;
  double sum = 0.0;
  double sum2 = 0.0;
  for (double e : errors_rad) {
    sum += e * kDeg;
    sum2 += (e * kDeg) * (e * kDeg);
  }
  const double n = static_cast<double>(errors_rad.size());
  ErrorStats out;
  out.count = errors_rad.size();
  out.mae_deg = sum / n;
  out.rmse_deg = std::sqrt(sum2 / n);
  double var = 0.0;
  for (double e : errors_rad) var += (e * kDeg - out.mae_deg) * (e * kDeg - out.mae_deg);
  out.std_deg = std::sqrt(var / n);
  return out;
}

ErrorStats angular_error_stats(std::span<const double> estimate, std::span<const double> truth,
                               std::span<const std::uint8_t> mask, AngleAmbiguity ambiguity) {
  if (estimate.size() != truth.size() || mask.size() != truth.size())
    fail(ErrorKind::DomainError, "estimate, ground truth and mask sizes differ");
  std::vector<double> errors;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (mask[j]) errors.push_back(angle_error(estimate[j], truth[j], ambiguity));
  }
  return summarize_errors(errors);
}

ErrorStats angular_error_stats(const NormalField& estimate, const NormalField& truth, AngleAmbiguity ambiguity) {
  if (estimate.frame != truth.frame) fail(ErrorKind::FrameMismatch, "normal fields use different frames");
  if (estimate.pixel_count() != truth.pixel_count()) fail(ErrorKind::DomainError, "normal field sizes differ");
  std::vector<double> errors;
  for (std::size_t j = 0; j < truth.pixel_count(); ++j) {
    if (estimate.valid[j] && truth.valid[j]) errors.push_back(normal_error(estimate.normals[j], truth.normals[j], ambiguity));
  }
  return summarize_errors(errors);
}

SpecularDolpModel fit_specular_model(std::span<const std::pair<double, double>> zenith_dolp) {
  if (zenith_dolp.empty()) fail(ErrorKind::EmptyMask, "no samples to fit");
  // For fixed n the best scale is the least-squares ratio, clamped to (0, 1].
  auto residual = [&](double n, double* best_a) {
    double fr = 0.0;
    double ff = 0.0;
    for (const auto& [theta, rho] : zenith_dolp) {
      const double f = specular_curve(n, 1.0, theta);
      fr += f * rho;
      ff += f * f;
    }
    const double a = ff > 0.0 ? std::clamp(fr / ff, 1e-9, 1.0) : 1.0;
    double sse = 0.0;
    for (const auto& [theta, rho] : zenith_dolp) {
      const double e = a * specular_curve(n, 1.0, theta) - rho;
      sse += e * e;
    }
    if (best_a) *best_a = a;
    return sse;
  };
  for (const auto& [theta, rho] : zenith_dolp) {
    if (!(theta >= 0.0 && theta < kHalfPi) || !std::isfinite(rho)) fail(ErrorKind::DomainError, "fit samples out of range");
  }
  constexpr double kStep = 0.01;
  double best_n = 1.0 + kStep;
  double best = std::numeric_limits<double>::infinity();
  for (double n = 1.0 + kStep; n <= 3.0 + 1e-12; n += kStep) {
    const double e = residual(n, nullptr);
    if (e < best) {
      best = e;
      best_n = n;
    }
  }
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::max(1.0 + 1e-9, best_n - kStep);
  double hi = best_n + kStep;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = residual(x1, nullptr);
  double f2 = residual(x2, nullptr);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = residual(x1, nullptr);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = residual(x2, nullptr);
    }
  }
  SpecularDolpModel model;
  model.n = 0.5 * (lo + hi);
  residual(model.n, &model.a);
  return model;
}

}  // namespace polarproj
