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

// Stokes/Mueller algebra for linear polarization.
//
// Angle convention: every angle is measured in the coordinates of the frame it
// belongs to, from that frame's x-axis toward its y-axis. Image frames have x
// pointing right and y pointing down, so on screen the positive direction is
// clockwise. Every frame used in this library is right-handed with z along the
// ray, which keeps the formulas below free of sign patches.

#pragma once

#include <Eigen/Core>

#include <numbers>

namespace polarproj {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

struct StokesVector {
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;

  Eigen::Vector4d vec() const { return {s0, s1, s2, s3}; }
  static StokesVector from(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

  /// s0 >= 0 and s0^2 >= s1^2 + s2^2 + s3^2 up to `rel_tol` relative.
  bool realizable(double rel_tol = 1e-9) const;

  friend bool operator==(const StokesVector&, const StokesVector&) = default;
};

struct MuellerMatrix {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

  static MuellerMatrix identity() { return {}; }
  MuellerMatrix operator*(const MuellerMatrix& rhs) const { return {m * rhs.m}; }
  MuellerMatrix transpose() const { return {m.transpose()}; }
};

struct PolarizationSummary {
  double intensity = 0.0;
  double dolp = 0.0;
  double aolp = 0.0;  // [0, pi)
};

/// Parameters of the sinusoid I(alpha) = (i_max+i_min)/2 + (i_max-i_min)/2 cos(2 alpha - 2 phase).
struct SinusoidParams {
  double i_max = 0.0;
  double i_min = 0.0;
  double phase = 0.0;  // [0, pi)
};

/// Ideal linear polarizer with transmission axis at `alpha` from the x-axis.
MuellerMatrix linear_polarizer_mueller(double alpha);

/// Stokes frame rotation by `theta` about z:
/// [[1,0,0,0],[0,c,s,0],[0,-s,c,0],[0,0,0,1]] with c = cos 2theta, s = sin 2theta.
/// Satisfies rotator(t)^T * M_0 * rotator(t) == M_t.
MuellerMatrix rotator_mueller(double theta);

StokesVector apply_mueller(const MuellerMatrix& m, const StokesVector& s);

/// sqrt(s1^2 + s2^2 + s3^2) / s0. Values in (1, 1 + 1e-6] clamp to 1; larger
/// ones throw Unrealizable in strict mode and clamp with a warning otherwise.
/// Throws ZeroIntensity when s0 <= 0.
double dolp(const StokesVector& s);

/// 0.5 * atan2(s2, s1) wrapped into [0, pi). Throws UndefinedAngle when s1 = s2 = 0.
double aolp(const StokesVector& s);

PolarizationSummary summarize(const StokesVector& s);

struct StokesMixture {
  StokesVector unpolarized;
  StokesVector polarized;
};

/// Splits s into ((1-rho) s0, 0, 0, 0) and (rho s0, s1, s2, s3), which sum to s.
StokesMixture mixture_decompose(const StokesVector& s);

SinusoidParams sinusoid_params(const StokesVector& s);

/// First row of M_alpha applied to s.
double intensity_through_polarizer(const StokesVector& s, double alpha);

/// Wraps any finite angle into [0, pi).
double wrap_pi(double angle);

/// min(|a-b| mod pi, pi - |a-b| mod pi): distance between two axial angles.
double axial_distance(double a, double b);

}  // namespace polarproj
