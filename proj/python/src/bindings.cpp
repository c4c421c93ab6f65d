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

// Python bindings: a thin numpy layer over the C++ library.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <polarproj/config.hpp>
#include <polarproj/error.hpp>
#include <polarproj/polcore.hpp>
#include <polarproj/rayframes.hpp>
#include <polarproj/sfp.hpp>
#include <polarproj/sim.hpp>
#include <polarproj/stokes.hpp>

#include <string>
#include <vector>

namespace py = pybind11;
namespace pp = polarproj;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using MaskArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

constexpr double kDeg = pp::kPi / 180.0;

Array make_array(std::vector<py::ssize_t> shape, const double* src) {
  Array out(shape);
  std::copy(src, src + out.size(), out.mutable_data());
  return out;
}

void require_shape(const py::array& a, int width, int height, const char* what) {
  if (a.ndim() < 2 || a.shape(0) != height || a.shape(1) != width)
    throw py::value_error(std::string(what) + " must have shape (height, width, ...) matching the intrinsics");
}

pp::ReflectionMode parse_mode(const std::string& mode) {
  if (mode == "specular") return pp::ReflectionMode::Specular;
  if (mode == "diffuse") return pp::ReflectionMode::Diffuse;
  throw py::value_error("mode must be 'specular' or 'diffuse'");
}

std::vector<double> radians(const std::vector<double>& degrees) {
  std::vector<double> out;
  for (double d : degrees) out.push_back(d * kDeg);
  return out;
}

py::tuple stokes_arrays(const pp::StokesMap& map) {
  const int w = map.width(), h = map.height();
  Array stokes({h, w, 3});
  py::array_t<std::uint8_t> status({h, w});
  auto* s = stokes.mutable_data();
  auto* st = status.mutable_data();
  for (std::size_t j = 0; j < map.pixel_count(); ++j) {
    s[3 * j] = map.stokes[j].s0;
    s[3 * j + 1] = map.stokes[j].s1;
    s[3 * j + 2] = map.stokes[j].s2;
    st[j] = static_cast<std::uint8_t>(map.status[j]);
  }
  return py::make_tuple(stokes, status);
}

py::dict simulate_plane(const pp::Intrinsics& k, double tilt_deg, double azimuth_deg, const std::vector<double>& angles_deg,
                        const std::string& mode, double n, double a, double sigma, int bits, std::uint64_t seed) {
  pp::SceneSpec scene;
  const double t = tilt_deg * kDeg, az = azimuth_deg * kDeg;
  scene.geometry = pp::PlaneGeometry{{std::sin(t) * std::cos(az), std::sin(t) * std::sin(az), -std::cos(t)}, 1.0};
  scene.mode = parse_mode(mode);
  scene.model = {n, a};
  const auto sim = pp::simulate_capture(scene, k, pp::MultishotSensor{radians(angles_deg)}, {sigma, bits, seed});
  const int w = k.width, h = k.height;
  const auto shots = static_cast<py::ssize_t>(sim.capture.images.size());
  Array images({shots, static_cast<py::ssize_t>(h), static_cast<py::ssize_t>(w)});
  for (py::ssize_t i = 0; i < shots; ++i) {
    const auto& src = sim.capture.images[static_cast<std::size_t>(i)].data;
    std::copy(src.begin(), src.end(), images.mutable_data() + i * w * h);
  }
  Array stokes({h, w, 3}), normals({h, w, 3});
  for (std::size_t j = 0; j < sim.truth.stokes.size(); ++j) {
    const auto& s = sim.truth.stokes[j];
    stokes.mutable_data()[3 * j] = s.s0;
    stokes.mutable_data()[3 * j + 1] = s.s1;
    stokes.mutable_data()[3 * j + 2] = s.s2;
    for (int c = 0; c < 3; ++c) normals.mutable_data()[3 * j + c] = sim.truth.normals[j][c];
  }
  py::dict out;
  out["images"] = images;
  out["stokes"] = stokes;
  out["aolp"] = make_array({h, w}, sim.truth.aolp.data());
  out["dolp"] = make_array({h, w}, sim.truth.dolp.data());
  out["zenith"] = make_array({h, w}, sim.truth.zenith.data());
  out["normals"] = normals;
  out["normal"] = py::make_tuple(std::get<pp::PlaneGeometry>(scene.geometry).normal.x(),
                                 std::get<pp::PlaneGeometry>(scene.geometry).normal.y(),
                                 std::get<pp::PlaneGeometry>(scene.geometry).normal.z());
  return out;
}

py::tuple estimate_stokes(Array images, const std::vector<double>& angles_deg, const pp::Intrinsics& k,
                          const std::string& pipeline) {
  if (images.ndim() != 3) throw py::value_error("images must have shape (N, height, width)");
  if (images.shape(1) != k.height || images.shape(2) != k.width)
    throw py::value_error("image size does not match the intrinsics");
  std::vector<pp::Image> raw;
  const std::size_t plane = static_cast<std::size_t>(k.width) * static_cast<std::size_t>(k.height);
  for (py::ssize_t i = 0; i < images.shape(0); ++i) {
    pp::Image img(k.width, k.height);
    std::copy(images.data() + i * plane, images.data() + (i + 1) * plane, img.data.begin());
    raw.push_back(std::move(img));
  }
  const auto angles = radians(angles_deg);
  const auto capture = pp::RawCapture::multishot(std::move(raw), angles);
  if (pipeline == "ortho") return stokes_arrays(pp::estimate_stokes_orthographic(capture, k));
  if (pipeline != "projective") throw py::value_error("pipeline must be 'ortho' or 'projective'");
  const auto frames = pp::RayFrameField::projective(k, pp::RayFrameField::Storage::Lazy);
  return stokes_arrays(pp::estimate_stokes_multishot(capture, pp::build_effective_angles(frames, angles)));
}

py::tuple estimate_plane(Array aolp, const pp::Intrinsics& k, MaskArray mask, const std::string& pipeline) {
  require_shape(aolp, k.width, k.height, "aolp");
  require_shape(mask, k.width, k.height, "mask");
  const auto frames = pipeline == "ortho" ? pp::RayFrameField::orthographic(k)
                                          : pp::RayFrameField::projective(k, pp::RayFrameField::Storage::Lazy);
  const auto est = pp::estimate_plane_normal({aolp.data(), static_cast<std::size_t>(aolp.size())}, frames,
                                             {mask.data(), static_cast<std::size_t>(mask.size())});
  return py::make_tuple(py::make_tuple(est.normal.x(), est.normal.y(), est.normal.z()), est.residual, est.count);
}

Array effective_angles(const pp::Intrinsics& k, const std::vector<double>& angles_deg) {
  const auto frames = pp::RayFrameField::projective(k, pp::RayFrameField::Storage::Lazy);
  const auto eff = pp::build_effective_angles(frames, radians(angles_deg));
  return make_array({k.height, k.width, static_cast<py::ssize_t>(angles_deg.size())}, eff.values.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Projective polarization camera model";

  // Errors surface as PolarprojError (a ValueError) carrying the kind name.
  static PyObject* error_type = py::exception<pp::Error>(m, "PolarprojError", PyExc_ValueError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const pp::Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
      instance.attr("kind") = std::string(pp::name(e.kind()));
      PyErr_SetObject(error_type, instance.ptr());
    }
  });

  py::class_<pp::Intrinsics>(m, "Intrinsics")
      .def(py::init([](double fx, double fy, double cx, double cy, int width, int height, double skew, double pixel_offset) {
             pp::Intrinsics k{fx, fy, cx, cy, skew, width, height, pixel_offset};
             k.validate();
             return k;
           }),
           py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"), py::arg("width"), py::arg("height"),
           py::arg("skew") = 0.0, py::arg("pixel_offset") = 0.0)
      .def_readwrite("fx", &pp::Intrinsics::fx)
      .def_readwrite("fy", &pp::Intrinsics::fy)
      .def_readwrite("cx", &pp::Intrinsics::cx)
      .def_readwrite("cy", &pp::Intrinsics::cy)
      .def_readwrite("skew", &pp::Intrinsics::skew)
      .def_readwrite("width", &pp::Intrinsics::width)
      .def_readwrite("height", &pp::Intrinsics::height)
      .def_readwrite("pixel_offset", &pp::Intrinsics::pixel_offset);

  m.def("set_strict_mode", &pp::set_strict_mode, py::arg("strict"));
  m.def("set_thread_limit", &pp::set_thread_limit, py::arg("threads"));

  m.def(
      "aolp", [](double s0, double s1, double s2) { return pp::aolp({s0, s1, s2, 0.0}); }, py::arg("s0"), py::arg("s1"),
      py::arg("s2"));
  m.def(
      "dolp", [](double s0, double s1, double s2) { return pp::dolp({s0, s1, s2, 0.0}); }, py::arg("s0"), py::arg("s1"),
      py::arg("s2"));
  m.def(
      "intensity_through_polarizer",
      [](double s0, double s1, double s2, double alpha) { return pp::intensity_through_polarizer({s0, s1, s2, 0.0}, alpha); },
      py::arg("s0"), py::arg("s1"), py::arg("s2"), py::arg("alpha"));

  m.def(
      "backproject",
      [](const pp::Intrinsics& k, double u, double v) {
        const auto r = pp::backproject(k, {u, v});
        return py::make_tuple(r.x(), r.y(), r.z());
      },
      py::arg("k"), py::arg("u"), py::arg("v"));
  m.def(
      "local_frame",
      [](double x, double y, double z) {
        const auto f = pp::local_frame(Eigen::Vector3d(x, y, z).normalized());
        Array out({3, 3});
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) out.mutable_at(r, c) = f.rotation(r, c);
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("z"), "Rotation whose columns are r_x, r_y, r_z for a ray.");
  m.def(
      "effective_angle",
      [](double x, double y, double z, double alpha) {
        return pp::effective_angle(pp::local_frame(Eigen::Vector3d(x, y, z).normalized()), alpha);
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("alpha"));
  m.def("effective_angles", &effective_angles, py::arg("k"), py::arg("angles_deg"),
        "Per-pixel effective angles (radians), shape (height, width, N).");

  m.def(
      "dolp_specular", [](double theta, double n, double a) { return pp::dolp_specular({n, a}, theta); },
      py::arg("theta"), py::arg("n") = 1.5, py::arg("a") = 1.0);
  m.def(
      "zenith_from_dolp",
      [](double rho, double n, double a, const std::string& branch) {
        if (branch != "low" && branch != "high") throw py::value_error("branch must be 'low' or 'high'");
        return pp::zenith_from_dolp({n, a}, rho, branch == "low" ? pp::ZenithBranch::Low : pp::ZenithBranch::High).theta;
      },
      py::arg("rho"), py::arg("n") = 1.5, py::arg("a") = 1.0, py::arg("branch") = "low");

  m.def("simulate_plane", &simulate_plane, py::arg("k"), py::arg("tilt_deg"), py::arg("azimuth_deg"),
        py::arg("angles_deg") = std::vector<double>{0, 45, 90, 135}, py::arg("mode") = "specular", py::arg("n") = 1.5,
        py::arg("a") = 1.0, py::arg("sigma") = 0.0, py::arg("bits") = 0, py::arg("seed") = 0,
        "Render a tilted plane; returns images (N, H, W) and ground-truth maps.");
  m.def("estimate_stokes", &estimate_stokes, py::arg("images"), py::arg("angles_deg"), py::arg("k"),
        py::arg("pipeline") = "projective", "Returns (stokes (H, W, 3), status (H, W)).");
  m.def("estimate_plane_normal", &estimate_plane, py::arg("aolp"), py::arg("k"), py::arg("mask"),
        py::arg("pipeline") = "projective", "Returns (normal, residual, count).");
}
