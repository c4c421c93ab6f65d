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

#include "polarproj/stokes.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "polarproj/config.hpp"
#include "polarproj/error.hpp"

namespace polarproj {

MosaicLayout MosaicLayout::imx250mzr() {
  MosaicLayout layout;
  layout.pattern = {{{kPi / 2.0, kPi / 4.0}, {3.0 * kPi / 4.0, 0.0}}};
  return layout;
}

std::vector<double> MosaicLayout::angles() const {
  return {pattern[0][0], pattern[0][1], pattern[1][0], pattern[1][1]};
}

void MosaicLayout::validate() const {
  const auto a = angles();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) fail(ErrorKind::LayoutMismatch, "mosaic angles must be finite");
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (axial_distance(a[i], a[j]) < 1e-9) fail(ErrorKind::LayoutMismatch, "mosaic angles must be distinct mod 180");
    }
  }
}

namespace {

std::size_t distinct_axial(std::span<const double> angles) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j) seen = seen || axial_distance(angles[i], angles[j]) < 1e-9;
    if (!seen) ++count;
  }
  return count;
}

void check_image(const Image& image, int width, int height) {
  if (image.channels != 1) fail(ErrorKind::DomainError, "raw images must have one channel");
  if (!image.same_shape(width, height)) fail(ErrorKind::DomainError, "raw images must share dimensions");
  for (double v : image.data) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::DomainError, "raw intensities must be finite and >= 0");
  }
}

}  // namespace

RawCapture RawCapture::multishot(std::vector<Image> images, std::vector<double> angles,
                                 std::optional<double> saturation) {
  if (images.size() != angles.size()) fail(ErrorKind::DomainError, "one nominal angle per image is required");
  if (images.empty()) fail(ErrorKind::DomainError, "a multishot capture needs images");
  for (const auto& image : images) check_image(image, images.front().width, images.front().height);
  if (distinct_axial(angles) < 3)
    fail(ErrorKind::RankDeficient, "multishot capture needs >= 3 angles distinct mod 180");
  RawCapture capture;
  capture.kind = CaptureKind::Multishot;
  capture.images = std::move(images);
  capture.angles = std::move(angles);
  capture.saturation = saturation;
  return capture;
}

RawCapture RawCapture::mosaic(Image image, const MosaicLayout& layout, std::optional<double> saturation) {
  layout.validate();
  check_image(image, image.width, image.height);
  RawCapture capture;
  capture.kind = CaptureKind::Mosaic;
  capture.images.push_back(std::move(image));
  capture.layout = layout;
  capture.saturation = saturation;
  return capture;
}

std::vector<double> RawCapture::nominal_angles() const {
  return kind == CaptureKind::Mosaic ? layout.angles() : angles;
}

std::size_t StokesMap::count(PixelStatus s) const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
}

namespace {

template <int MaxRows>
std::optional<Eigen::Vector3d> solve_rows(std::span<const double> angles, std::span<const double> intensities) {
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::ColMajor, MaxRows, 3>;
  using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, MaxRows, 1>;
  const auto rows = static_cast<Eigen::Index>(angles.size());
  Matrix a(rows, 3);
  Vector b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double alpha = angles[static_cast<std::size_t>(r)];
    a(r, 0) = 0.5;
    a(r, 1) = 0.5 * std::cos(2.0 * alpha);
    a(r, 2) = 0.5 * std::sin(2.0 * alpha);
    b(r) = intensities[static_cast<std::size_t>(r)];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const auto& r = qr.matrixR();
  const double largest = std::abs(r(0, 0));
  if (!(largest > 0.0) || std::abs(r(2, 2)) < 1e-10 * largest) return std::nullopt;
  return Eigen::Vector3d(qr.solve(b));
}

}  // namespace

std::optional<Eigen::Vector3d> solve_polarizer_system(std::span<const double> angles,
                                                      std::span<const double> intensities) {
  if (angles.size() != intensities.size()) fail(ErrorKind::DomainError, "one intensity per angle is required");
  if (angles.size() < 3) return std::nullopt;
  if (angles.size() <= 16) return solve_rows<16>(angles, intensities);
  if (angles.size() <= 64) return solve_rows<64>(angles, intensities);
  return solve_rows<Eigen::Dynamic>(angles, intensities);
}

namespace {

constexpr std::size_t kMaxInline = 64;

/// Fixed-capacity scratch for one pixel's equations; spills to the heap for
/// very large windows.
struct Equations {
  std::array<double, kMaxInline> angle_buf{};
  std::array<double, kMaxInline> value_buf{};
  std::vector<double> angle_heap;
  std::vector<double> value_heap;
  std::size_t size = 0;
  std::size_t dropped = 0;
  bool heap = false;

  explicit Equations(std::size_t capacity) : heap(capacity > kMaxInline) {
    if (heap) {
      angle_heap.resize(capacity);
      value_heap.resize(capacity);
    }
  }
  void clear() { size = dropped = 0; }
  void push(double angle, double value) {
    (heap ? angle_heap[size] : angle_buf[size]) = angle;
    (heap ? value_heap[size] : value_buf[size]) = value;
    ++size;
  }
  std::span<const double> angles() const { return {heap ? angle_heap.data() : angle_buf.data(), size}; }
  std::span<const double> values() const { return {heap ? value_heap.data() : value_buf.data(), size}; }
};

void finish_pixel(const Equations& eq, bool strict, StokesVector& out, PixelStatus& status) {
  const auto solution = solve_polarizer_system(eq.angles(), eq.values());
  if (!solution) {
    out = {};
    status = PixelStatus::RankDeficient;
    return;
  }
  out = {(*solution)[0], (*solution)[1], (*solution)[2], 0.0};
  status = eq.dropped > 0 ? PixelStatus::Saturated : PixelStatus::Valid;
  const double linear = std::hypot(out.s1, out.s2);
  if (linear > out.s0) {
    const double ratio = out.s0 > 0.0 ? linear / out.s0 : INFINITY;
    if (ratio <= 1.0 + 1e-9) {
      out.s1 /= ratio;
      out.s2 /= ratio;
    } else if (!strict || ratio <= 1.0 + 1e-6) {
      if (out.s0 > 0.0) {
        out.s1 /= ratio;
        out.s2 /= ratio;
      } else {
        out = {0.0, 0.0, 0.0, 0.0};
      }
      status = PixelStatus::Clamped;
    } else {
      status = PixelStatus::Unrealizable;
    }
  }
}

StokesMap blank_map(const Intrinsics& k, FrameConvention frame, int width, int height) {
  if (k.width != width || k.height != height)
    fail(ErrorKind::DomainError, "capture dimensions do not match the intrinsics");
  StokesMap map;
  map.intrinsics = k;
  map.frame = frame;
  map.stokes.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  map.status.resize(map.stokes.size(), PixelStatus::Valid);
  return map;
}

bool saturated(const RawCapture& capture, double value) {
  return capture.saturation && value >= *capture.saturation;
}

/// AngleOf(pixel, eff_index, center_pixel) -> effective angle of that polarizer.
template <class AngleOf>
void run_multishot(const RawCapture& capture, std::span<const int> index_of, const AngleOf& angle_of, StokesMap& map) {
  const int width = capture.width();
  const bool strict = strict_mode();
  const std::size_t n = capture.images.size();
  detail::parallel_rows(capture.height(), [&](int begin, int end) {
    Equations eq(n);
    for (int v = begin; v < end; ++v) {
      for (int u = 0; u < width; ++u) {
        const std::size_t pixel = static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u);
        eq.clear();
        for (std::size_t i = 0; i < n; ++i) {
          const double value = capture.images[i].data[pixel];
          if (saturated(capture, value)) {
            ++eq.dropped;
            continue;
          }
          eq.push(angle_of(pixel, index_of[i], pixel), value);
        }
        finish_pixel(eq, strict, map.stokes[pixel], map.status[pixel]);
      }
    }
  });
}

template <class AngleOf>
void run_dofp(const RawCapture& capture, const DemosaicOptions& options, std::span<const int> cell_index,
              const AngleOf& angle_of, StokesMap& map) {
  const int width = capture.width();
  const int height = capture.height();
  const int h = options.window;
  const bool strict = strict_mode();
  const Image& image = capture.images.front();
  const auto& layout = capture.layout;
  detail::parallel_rows(height, [&](int begin, int end) {
    Equations eq(static_cast<std::size_t>(h) * static_cast<std::size_t>(h));
    for (int v = begin; v < end; ++v) {
      const int y0 = std::clamp(v - (h - 1) / 2, 0, height - h);
      for (int u = 0; u < width; ++u) {
        const int x0 = std::clamp(u - (h - 1) / 2, 0, width - h);
        const std::size_t center = static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u);
        eq.clear();
        for (int y = y0; y < y0 + h; ++y) {
          for (int x = x0; x < x0 + h; ++x) {
            const std::size_t site = image.index(x, y);
            const double value = image.data[site];
            if (saturated(capture, value)) {
              ++eq.dropped;
              continue;
            }
            const int cell = ((y + layout.row_parity) & 1) * 2 + ((x + layout.col_parity) & 1);
            eq.push(angle_of(site, cell_index[static_cast<std::size_t>(cell)], center), value);
          }
        }
        finish_pixel(eq, strict, map.stokes[center], map.status[center]);
      }
    }
  });
}

std::vector<int> eff_indices(const EffectiveAngleField& eff, std::span<const double> angles) {
  std::vector<int> out;
  for (double a : angles) {
    const int i = eff.find(a);
    if (i < 0) fail(ErrorKind::LayoutMismatch, "effective-angle field does not cover nominal angle " + std::to_string(a));
    out.push_back(i);
  }
  return out;
}

void check_window(const RawCapture& capture, const DemosaicOptions& options) {
  if (capture.kind != CaptureKind::Mosaic) fail(ErrorKind::DomainError, "DoFP estimation needs a mosaic capture");
  if (options.window < 2) fail(ErrorKind::LayoutMismatch, "window: H must be >= 2 to cover 3 distinct angles");
  if (capture.width() < options.window || capture.height() < options.window)
    fail(ErrorKind::LayoutMismatch, "window: image is smaller than the H x H neighbourhood");
}

}  // namespace

StokesMap estimate_stokes_multishot(const RawCapture& capture, const EffectiveAngleField& eff) {
  if (capture.kind != CaptureKind::Multishot) fail(ErrorKind::DomainError, "multishot estimation needs a multishot capture");
  StokesMap map = blank_map(eff.intrinsics, FrameConvention::Local, capture.width(), capture.height());
  const auto index_of = eff_indices(eff, capture.angles);
  run_multishot(capture, index_of, [&eff](std::size_t pixel, int i, std::size_t) { return eff.at(pixel, static_cast<std::size_t>(i)); }, map);
  return map;
}

StokesMap estimate_stokes_dofp(const RawCapture& capture, const EffectiveAngleField& eff, const DemosaicOptions& options) {
  check_window(capture, options);
  StokesMap map = blank_map(eff.intrinsics, FrameConvention::Local, capture.width(), capture.height());
  const auto cell_index = eff_indices(eff, capture.layout.angles());
  if (options.eff_angle_at_center) {
    run_dofp(capture, options, cell_index,
             [&eff](std::size_t, int i, std::size_t center) { return eff.at(center, static_cast<std::size_t>(i)); }, map);
  } else {
    run_dofp(capture, options, cell_index,
             [&eff](std::size_t site, int i, std::size_t) { return eff.at(site, static_cast<std::size_t>(i)); }, map);
  }
  return map;
}

StokesMap estimate_stokes_orthographic(const RawCapture& capture, const Intrinsics& k, const DemosaicOptions& options) {
  StokesMap map = blank_map(k, FrameConvention::Camera, capture.width(), capture.height());
  const std::vector<double> nominal = capture.nominal_angles();
  std::vector<int> identity(nominal.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  const auto by_index = [&nominal](std::size_t, int i, std::size_t) { return nominal[static_cast<std::size_t>(i)]; };
  if (capture.kind == CaptureKind::Multishot) {
    run_multishot(capture, identity, by_index, map);
  } else {
    check_window(capture, options);
    run_dofp(capture, options, identity, by_index, map);
  }
  return map;
}

StokesVector closed_form_pfa(double i0, double i45, double i90, double i135) {
  return {i0 + i90, i0 - i90, i45 - i135, 0.0};
}

std::vector<Image> synthesize_ideal_images(const StokesMap& map, std::span<const double> gammas) {
  if (map.frame != FrameConvention::Local)
    fail(ErrorKind::FrameMismatch, "ideal-polarizer synthesis expects a local-frame Stokes map");
  std::vector<Image> out;
  out.reserve(gammas.size());
  for (double gamma : gammas) {
    Image image(map.width(), map.height());
    const double c = 0.5 * std::cos(2.0 * gamma);
    const double s = 0.5 * std::sin(2.0 * gamma);
    for (std::size_t j = 0; j < map.pixel_count(); ++j) {
      if (!usable(map.status[j])) continue;
      const auto& st = map.stokes[j];
      image.data[j] = 0.5 * st.s0 + c * st.s1 + s * st.s2;
    }
    out.push_back(std::move(image));
  }
  return out;
}

}  // namespace polarproj
