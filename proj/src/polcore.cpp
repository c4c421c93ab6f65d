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

#include "polarproj/polcore.hpp"

#include <cmath>
#include <string>

#include "polarproj/config.hpp"
#include "polarproj/error.hpp"

namespace polarproj {

bool StokesVector::realizable(double rel_tol) const {
  if (!(s0 >= 0.0)) return false;
  const double pol2 = s1 * s1 + s2 * s2 + s3 * s3;
  return pol2 <= s0 * s0 * (1.0 + rel_tol);
}

MuellerMatrix linear_polarizer_mueller(double alpha) {
  const double c = std::cos(2.0 * alpha);
  const double s = std::sin(2.0 * alpha);
  MuellerMatrix out;
  out.m << 1.0, c, s, 0.0,
           c, c * c, s * c, 0.0,
           s, s * c, s * s, 0.0,
           0.0, 0.0, 0.0, 0.0;
  out.m *= 0.5;
  return out;
}

MuellerMatrix rotator_mueller(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  MuellerMatrix out;
  out.m << 1.0, 0.0, 0.0, 0.0,
           0.0, c, s, 0.0,
           0.0, -s, c, 0.0,
           0.0, 0.0, 0.0, 1.0;
  return out;
}

StokesVector apply_mueller(const MuellerMatrix& m, const StokesVector& s) {
  return StokesVector::from(m.m * s.vec());
}

double dolp(const StokesVector& s) {
  if (!(s.s0 > 0.0)) fail(ErrorKind::ZeroIntensity, "dolp requires s0 > 0");
  const double rho = std::sqrt(s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3) / s.s0;
  if (rho <= 1.0) return rho;
  if (rho <= 1.0 + 1e-6) return 1.0;
  if (strict_mode()) fail(ErrorKind::Unrealizable, "DoLP " + std::to_string(rho) + " exceeds 1");
  warn("dolp: DoLP above 1 clamped (first value " + std::to_string(rho) + ")");
  return 1.0;
}

double wrap_pi(double angle) {
  double r = std::fmod(angle, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

double axial_distance(double a, double b) {
  const double d = wrap_pi(a - b);
  return std::min(d, kPi - d);
}

double aolp(const StokesVector& s) {
  if (s.s1 == 0.0 && s.s2 == 0.0) fail(ErrorKind::UndefinedAngle, "aolp of a linearly unpolarized vector");
  return wrap_pi(0.5 * std::atan2(s.s2, s.s1));
}

PolarizationSummary summarize(const StokesVector& s) {
  PolarizationSummary out;
  out.intensity = s.s0;
  out.dolp = dolp(s);
  out.aolp = (s.s1 == 0.0 && s.s2 == 0.0) ? 0.0 : aolp(s);
  return out;
}

StokesMixture mixture_decompose(const StokesVector& s) {
  const double rho = dolp(s);
  StokesMixture out;
  out.unpolarized = {(1.0 - rho) * s.s0, 0.0, 0.0, 0.0};
  out.polarized = {rho * s.s0, s.s1, s.s2, s.s3};
  return out;
}

SinusoidParams sinusoid_params(const StokesVector& s) {
  if (!(s.s0 > 0.0)) fail(ErrorKind::ZeroIntensity, "sinusoid_params requires s0 > 0");
  const double linear = std::hypot(s.s1, s.s2);
  SinusoidParams out;
  out.i_max = 0.5 * (s.s0 + linear);
  out.i_min = 0.5 * (s.s0 - linear);
  out.phase = linear > 0.0 ? wrap_pi(0.5 * std::atan2(s.s2, s.s1)) : 0.0;
  return out;
}

double intensity_through_polarizer(const StokesVector& s, double alpha) {
  return 0.5 * (s.s0 + std::cos(2.0 * alpha) * s.s1 + std::sin(2.0 * alpha) * s.s2);
}

}  // namespace polarproj
