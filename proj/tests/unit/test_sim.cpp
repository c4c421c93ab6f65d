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

#include <polarproj/sim.hpp>

#include <cmath>

#include "helpers.hpp"

namespace pp = polarproj;
using pp::ErrorKind;

namespace {

constexpr double kDeg = pp::kPi / 180.0;

const std::vector<double> kFour = {0.0, pp::kPi / 4, pp::kPi / 2, 3 * pp::kPi / 4};

pp::SceneSpec tilted_plane(double tilt_deg = 30.0, double azimuth_deg = 15.0) {
  pp::SceneSpec scene;
  const double t = tilt_deg * kDeg, a = azimuth_deg * kDeg;
  scene.geometry = pp::PlaneGeometry{{std::sin(t) * std::cos(a), std::sin(t) * std::sin(a), -std::cos(t)}, 2.0};
  return scene;
}

/// A 2x2 window onto the 2448 x 2048, f = 2300 sensor: pixel (0, 0) of the
/// window sees the same ray as sensor pixel (u0, v0).
pp::Intrinsics sensor_window(int u0, int v0) {
  pp::Intrinsics k;
  k.fx = k.fy = 2300.0;
  k.width = k.height = 2;
  k.cx = 2447.0 / 2 - u0;
  k.cy = 2047.0 / 2 - v0;
  return k;
}

pp::Intrinsics small_camera() {
  pp::Intrinsics k;
  k.fx = k.fy = 30.0;
  k.width = 40;
  k.height = 30;
  k.cx = 19.5;
  k.cy = 14.5;
  return k;
}

}  // namespace

TEST_CASE("a frontal plane is unpolarized at the principal point") {
  pp::Intrinsics k = small_camera();
  k.width = k.height = 1;
  k.cx = k.cy = 0.0;
  pp::SceneSpec scene;
  scene.s0_base = 0.8;
  const auto sim = pp::simulate_capture(scene, k, pp::MultishotSensor{kFour});
  CHECK(sim.truth.dolp[0] == 0.0);
  CHECK(sim.truth.zenith[0] == 0.0);
  for (const auto& img : sim.capture.images) CHECK(img.data[0] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("uniform Stokes under orthographic frames follows Malus' law") {
  const auto k = small_camera();
  pp::SceneSpec scene;
  const pp::StokesVector s{1.0, 0.6, 0.0, 0.0};  // horizontal, DoLP 0.6
  scene.geometry = pp::UniformStokes{s};
  const std::vector<double> angles = {0.0, 0.3, 0.9, 1.4, 2.2};
  const auto sim = pp::simulate_capture(scene, pp::RayFrameField::orthographic(k), pp::MultishotSensor{angles});
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double expected = 0.5 * (1.0 + 0.6 * std::cos(2 * angles[i]));
    for (double v : sim.capture.images[i].data) REQUIRE(v == doctest::Approx(expected).epsilon(1e-15));
  }
  CHECK_FALSE(sim.truth.has_normals);
}

TEST_CASE("the tilted polarizer changes corner intensities measurably") {
  const auto margin = [](int u0, int v0, int du, int dv) {
    const auto k = sensor_window(u0, v0);
    const auto sim = pp::simulate_capture(tilted_plane(), k, pp::MultishotSensor{kFour});
    const std::size_t j = static_cast<std::size_t>(dv) * 2 + du;
    double worst = 0;
    for (std::size_t i = 0; i < kFour.size(); ++i)
      worst = std::max(worst, std::abs(sim.capture.images[i].data[j] -
                                       pp::intensity_through_polarizer(sim.truth.stokes[j], kFour[i])));
    return worst;
  };
  const double first = margin(0, 0, 0, 0);
  const double last = margin(2446, 2046, 1, 1);
  CHECK(first == doctest::Approx(0.0086858347692802300458).epsilon(1e-9));
  CHECK(last == doctest::Approx(0.14182054829846230305).epsilon(1e-9));
  CHECK(first > 1e-4);
  CHECK(last > 1e-4);
}

TEST_CASE("expected AoLP maps") {
  const auto scene = tilted_plane();
  const auto k = small_camera();
  const auto ortho = pp::render_expected_aolp(scene, k, pp::AolpModel::Orthographic);
  for (double a : ortho.aolp) REQUIRE(a == doctest::Approx(0.26179938779914943654).epsilon(1e-15));

  pp::Intrinsics centred = k;
  centred.width = centred.height = 1;
  centred.cx = centred.cy = 0.0;
  CHECK(pp::render_expected_aolp(scene, centred, pp::AolpModel::Projective).aolp[0] ==
        doctest::Approx(0.26179938779914943654).epsilon(1e-14));

  const struct {
    int u, v;
    double aolp;
  } corners[] = {{0, 0, 1.651857891866811854},
                 {2447, 0, 3.0503926490881037311},
                 {0, 2047, 1.5301001731149794016},
                 {2447, 2047, 0.36367612871202148354}};
  for (const auto& c : corners) {
    const auto map = pp::render_expected_aolp(scene, sensor_window(c.u, c.v), pp::AolpModel::Projective);
    CHECK(map.aolp[0] == doctest::Approx(c.aolp).epsilon(1e-12));
  }
  const auto sim = pp::simulate_capture(scene, k, pp::MultishotSensor{kFour});
  const auto proj = pp::render_expected_aolp(scene, k, pp::AolpModel::Projective);
  for (std::size_t j = 0; j < proj.aolp.size(); ++j) REQUIRE(std::abs(proj.aolp[j] - sim.truth.aolp[j]) < 1e-14);

  pp::SceneSpec uniform;
  uniform.geometry = pp::UniformStokes{};
  CHECK_ERROR(pp::render_expected_aolp(uniform, k, pp::AolpModel::Projective), ErrorKind::DomainError);
}

TEST_CASE("diffuse mode rotates the AoLP by 90 degrees") {
  auto scene = tilted_plane();
  const auto k = small_camera();
  const auto specular = pp::simulate_capture(scene, k, pp::MultishotSensor{kFour});
  scene.mode = pp::ReflectionMode::Diffuse;
  const auto diff = pp::simulate_capture(scene, k, pp::MultishotSensor{kFour});
  for (std::size_t j = 0; j < specular.truth.aolp.size(); ++j)
    REQUIRE(pp::axial_distance(diff.truth.aolp[j], specular.truth.aolp[j] + pp::kHalfPi) < 1e-12);
}

TEST_CASE("noise is deterministic per seed and independent of threads") {
  const auto k = small_camera();
  const pp::NoiseSpec noise{0.01, 0, 42};
  pp::set_thread_limit(1);
  const auto a = pp::simulate_capture(tilted_plane(), k, pp::MosaicLayout::imx250mzr(), noise);
  pp::set_thread_limit(3);
  const auto b = pp::simulate_capture(tilted_plane(), k, pp::MosaicLayout::imx250mzr(), noise);
  pp::set_thread_limit(0);
  CHECK(a.capture.images[0].data == b.capture.images[0].data);
  const auto c = pp::simulate_capture(tilted_plane(), k, pp::MosaicLayout::imx250mzr(), pp::NoiseSpec{0.01, 0, 43});
  CHECK(a.capture.images[0].data != c.capture.images[0].data);

  // Moments of the keyed generator.
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double g = pp::keyed_gaussian(7, static_cast<std::uint64_t>(i), 3);
    sum += g;
    sq += g * g;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("quantized samples sit on the code grid") {
  const auto k = small_camera();
  const auto sim = pp::simulate_capture(tilted_plane(), k, pp::MultishotSensor{kFour}, pp::NoiseSpec{0.0, 8, 0});
  for (const auto& img : sim.capture.images)
    for (double v : img.data) REQUIRE(std::abs(v * 255 - std::round(v * 255)) < 1e-9);
}

TEST_CASE("noise-free samples lie between 0 and s0") {
  const auto k = small_camera();
  auto scene = tilted_plane(50, 200);
  scene.s0_base = 2.0;
  const auto sim = pp::simulate_capture(scene, k, pp::MultishotSensor{kFour});
  for (const auto& img : sim.capture.images)
    for (double v : img.data) REQUIRE((v >= 0.0 && v <= 2.0));
}

TEST_CASE("a mosaic samples the multishot images at each site's angle") {
  const auto k = small_camera();
  const auto layout = pp::MosaicLayout::imx250mzr();
  const auto angles = layout.angles();
  const auto shots = pp::simulate_capture(tilted_plane(), k, pp::MultishotSensor{angles});
  const auto mosaic = pp::simulate_capture(tilted_plane(), k, layout);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const double alpha = layout.angle_at(u, v);
      std::size_t i = 0;
      while (angles[i] != alpha) ++i;
      REQUIRE(mosaic.capture.images[0].at(u, v) == shots.capture.images[i].at(u, v));
    }
  }
}

TEST_CASE("invalid scenes and noise") {
  const auto k = small_camera();
  pp::SceneSpec away;
  away.geometry = pp::PlaneGeometry{Eigen::Vector3d(0.9, 0.0, -std::sqrt(1 - 0.81)), 1.0};
  CHECK_ERROR(pp::simulate_capture(away, k, pp::MultishotSensor{kFour}), ErrorKind::InvisiblePlane);
  pp::SceneSpec facing_away;
  facing_away.geometry = pp::PlaneGeometry{Eigen::Vector3d(0, 0, 1), 1.0};
  CHECK_ERROR(facing_away.validate(), ErrorKind::DomainError);
  CHECK_ERROR((pp::NoiseSpec{-0.1, 0, 0}.validate()), ErrorKind::DomainError);
  CHECK_ERROR((pp::NoiseSpec{0.0, 4, 0}.validate()), ErrorKind::DomainError);
  CHECK_ERROR((pp::NoiseSpec{0.0, 17, 0}.validate()), ErrorKind::DomainError);
  CHECK_ERROR(pp::simulate_capture(tilted_plane(), k, pp::MultishotSensor{{}}), ErrorKind::DomainError);
  pp::SceneSpec bogus;
  bogus.geometry = pp::UniformStokes{{1.0, 0.9, 0.9, 0.0}};
  CHECK_ERROR(bogus.validate(), ErrorKind::DomainError);
}
