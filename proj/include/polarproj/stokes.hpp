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

// Stokes estimation from raw polarimetric captures, and synthesis of images
// seen through ideal (untilted) polarizers.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polarproj/polcore.hpp"
#include "polarproj/raster.hpp"
#include "polarproj/rayframes.hpp"

namespace polarproj {

/// 2x2 micro-polarizer pattern. Pixel (u, v) sees
/// pattern[(v + row_parity) % 2][(u + col_parity) % 2].
struct MosaicLayout {
  std::array<std::array<double, 2>, 2> pattern{};  // radians
  int row_parity = 0;
  int col_parity = 0;

  /// [[90, 45], [135, 0]] degrees, the IMX250MZR arrangement.
  static MosaicLayout imx250mzr();

  double angle_at(int u, int v) const {
    return pattern[static_cast<std::size_t>((v + row_parity) & 1)][static_cast<std::size_t>((u + col_parity) & 1)];
  }
  /// The four pattern angles in row-major order.
  std::vector<double> angles() const;
  /// Throws LayoutMismatch unless the four angles are distinct mod pi.
  void validate() const;
};

enum class CaptureKind { Mosaic, Multishot };

struct RawCapture {
  CaptureKind kind = CaptureKind::Multishot;
  std::vector<Image> images;   // one image for Mosaic, N for Multishot
  std::vector<double> angles;  // Multishot: nominal angle of each image (radians)
  MosaicLayout layout;         // Mosaic only
  /// Samples >= saturation are treated as clipped and left out of the solve.
  std::optional<double> saturation;

  /// Throws DomainError on inconsistent shapes or negative samples, and
  /// RankDeficient when fewer than 3 angles are distinct mod pi.
  static RawCapture multishot(std::vector<Image> images, std::vector<double> angles,
                              std::optional<double> saturation = std::nullopt);
  /// Throws DomainError / LayoutMismatch.
  static RawCapture mosaic(Image image, const MosaicLayout& layout,
                           std::optional<double> saturation = std::nullopt);

  int width() const { return images.empty() ? 0 : images.front().width; }
  int height() const { return images.empty() ? 0 : images.front().height; }
  /// Nominal angles the capture uses (the layout's four for a mosaic).
  std::vector<double> nominal_angles() const;
};

enum class FrameConvention : std::uint8_t { Local, Camera };

enum class PixelStatus : std::uint8_t {
  Valid = 0,
  RankDeficient = 1,  // fewer than 3 independent equations; values are zero
  Saturated = 2,      // solved after dropping saturated samples
  Clamped = 3,        // DoLP exceeded 1 and was scaled back (permissive mode)
  Unrealizable = 4,   // DoLP exceeded 1 in strict mode; values left as solved
};

constexpr bool usable(PixelStatus s) {
  return s == PixelStatus::Valid || s == PixelStatus::Saturated || s == PixelStatus::Clamped;
}

struct StokesMap {
  Intrinsics intrinsics;
  FrameConvention frame = FrameConvention::Local;
  std::vector<StokesVector> stokes;  // s3 == 0 everywhere
  std::vector<PixelStatus> status;

  int width() const { return intrinsics.width; }
  int height() const { return intrinsics.height; }
  std::size_t pixel_count() const { return stokes.size(); }
  std::size_t count(PixelStatus s) const;
};

struct DemosaicOptions {
  int window = 2;                    // H: the H x H neighbourhood
  bool eff_angle_at_center = false;  // evaluate alpha_hat at the centre ray only
};

/// Least-squares (s0, s1, s2) from intensities seen through ideal polarizers
/// at `angles`. Empty when the system has rank < 3 (smallest R diagonal below
/// 1e-10 of the largest, column-pivoted Householder QR).
std::optional<Eigen::Vector3d> solve_polarizer_system(std::span<const double> angles,
                                                      std::span<const double> intensities);

/// Per-pixel solve with the effective angles of each pixel. Output is in the
/// per-pixel local frames.
StokesMap estimate_stokes_multishot(const RawCapture& capture, const EffectiveAngleField& eff);

/// DoFP estimation: each pixel solves the system built from its H x H
/// neighbourhood (window shifted inward at the borders), one equation per
/// photosite using that photosite's effective angle.
StokesMap estimate_stokes_dofp(const RawCapture& capture, const EffectiveAngleField& eff,
                               const DemosaicOptions& options = {});

/// Same pipelines with nominal angles and identity frames (camera frame).
StokesMap estimate_stokes_orthographic(const RawCapture& capture, const Intrinsics& k,
                                       const DemosaicOptions& options = {});

/// (i0 + i90, i0 - i90, i45 - i135, 0).
StokesVector closed_form_pfa(double i0, double i45, double i90, double i135);

inline constexpr std::array<double, 4> kPfaAngles = {0.0, kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0};

/// I_gamma(j) = M^1_gamma S_j for each gamma; unusable pixels are zero.
/// Throws FrameMismatch for camera-frame maps.
std::vector<Image> synthesize_ideal_images(const StokesMap& map,
                                           std::span<const double> gammas = kPfaAngles);

}  // namespace polarproj
