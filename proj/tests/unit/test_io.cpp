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

#include <polarproj/io.hpp>

#include <cstring>
#include <random>
#include <string>

#include "helpers.hpp"

namespace pp = polarproj;
namespace io = polarproj::io;
namespace fs = std::filesystem;
using pp::ErrorKind;

namespace {

io::Bytes bytes_of(const std::string& s) { return io::Bytes(s.begin(), s.end()); }

void append_float(io::Bytes& out, float f, bool big_endian) {
  std::uint8_t b[4];
  std::memcpy(b, &f, 4);
  if (big_endian) std::swap(b[0], b[3]), std::swap(b[1], b[2]);
  out.insert(out.end(), b, b + 4);
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("polarproj_io_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("PFM decoding") {
  io::Bytes file = bytes_of("PF\n3 2\n-1.0\n");
  for (int i = 0; i < 18; ++i) append_float(file, static_cast<float>(i), false);
  REQUIRE(file.size() == 12 + 72);
  const auto map = io::decode_pfm(file);
  CHECK(map.width == 3);
  CHECK(map.height == 2);
  CHECK(map.channels == 3);
  // Rows are stored bottom to top.
  CHECK(map.data[0] == 9.0f);
  CHECK(map.data[9] == 0.0f);

  io::Bytes big = bytes_of("Pf\n2 1\n1.0\n");
  append_float(big, 1.5f, true);
  append_float(big, -2.25f, true);
  const auto be = io::decode_pfm(big);
  CHECK(be.channels == 1);
  CHECK(be.data == std::vector<float>{1.5f, -2.25f});

  file.pop_back();
  CHECK_ERROR(io::decode_pfm(file), ErrorKind::CorruptFile);
  CHECK_ERROR(io::decode_pfm(bytes_of("PF\n3 2\n0.0\n")), ErrorKind::CorruptFile);
  CHECK_ERROR(io::decode_pfm(bytes_of("P6\n3 2\n255\n")), ErrorKind::UnsupportedFormat);
}

TEST_CASE("PFM round trip is bit exact") {
  io::FloatMap map{4, 3, 1, {}, false};
  std::mt19937 rng(3);
  std::normal_distribution<float> g;
  for (int i = 0; i < 12; ++i) map.data.push_back(g(rng));
  map.data[5] = -0.0f;
  CHECK(io::decode_pfm(io::encode_pfm(map)) == map);
  auto bottom = map;
  bottom.bottom_up = true;
  // A bottom-up buffer is written as is, so it decodes with its rows reversed.
  const auto decoded = io::decode_pfm(io::encode_pfm(bottom));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) CHECK(decoded.data[r * 4 + c] == map.data[(2 - r) * 4 + c]);
}

TEST_CASE("PGM decoding") {
  io::Bytes file = bytes_of("P5\n# comment\n2 1\n65535\n");
  for (std::uint16_t v : {std::uint16_t{32768}, std::uint16_t{16384}}) {
    file.push_back(static_cast<std::uint8_t>(v >> 8));
    file.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  const auto raw = io::decode_pgm(file);
  CHECK(raw.bit_depth == 16);
  CHECK(raw.pixels.data[0] == doctest::Approx(0.50000762951094834821).epsilon(1e-15));
  CHECK(raw.pixels.data[1] == doctest::Approx(0.25000381475547417411).epsilon(1e-15));

  CHECK_ERROR(io::decode_pgm(bytes_of("P2\n2 1\n255\n1 2\n")), ErrorKind::UnsupportedFormat);
  file.pop_back();
  CHECK_ERROR(io::decode_pgm(file), ErrorKind::CorruptFile);
  io::Bytes over = bytes_of("P5 1 1 100\n");
  over.push_back(200);
  CHECK_ERROR(io::decode_pgm(over), ErrorKind::CorruptFile);

  pp::Raster<std::uint16_t> img(3, 2);
  img.data = {0, 1, 2, 1000, 4095, 7};
  const auto back = io::decode_pgm(io::encode_pgm(img, 4095));
  CHECK(back.maxval == 4095);
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(back.pixels.data[i] * 4095 == doctest::Approx(img.data[i]));
}

TEST_CASE("PNG round trips at 8 and 16 bits") {
  pp::Raster<std::uint16_t> img(5, 4);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<std::uint16_t>(i * 3000);
  const auto wide = io::decode_png(io::encode_png(img, 16));
  CHECK(wide.bit_depth == 16);
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(wide.pixels.data[i] * 65535 == doctest::Approx(img.data[i]));
  for (auto& v : img.data) v %= 256;
  const auto narrow = io::decode_png(io::encode_png(img, 8));
  CHECK(narrow.bit_depth == 8);
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(narrow.pixels.data[i] * 255 == doctest::Approx(img.data[i]));
  auto broken = io::encode_png(img, 8);
  broken.resize(broken.size() / 2);
  CHECK_ERROR(io::decode_png(broken), ErrorKind::CorruptFile);
}

TEST_CASE("NPY round trips") {
  io::NpyArray a{{2, 3}, {0.1, -2.5, 1e300, 0.0, 4.0, 5.5}};
  const auto bytes = io::encode_npy(a);
  // Header padded so the payload starts on a 64-byte boundary.
  CHECK((bytes.size() - 6 * 8) % 64 == 0);
  const auto b = io::decode_npy(bytes);
  CHECK(b.shape == a.shape);
  CHECK(b.data == a.data);
  io::Bytes fortran = bytes;
  const std::string header(fortran.begin(), fortran.begin() + 80);
  const auto pos = header.find("False");
  REQUIRE(pos != std::string::npos);
  std::memcpy(fortran.data() + pos, "True ", 5);
  CHECK_ERROR(io::decode_npy(fortran), ErrorKind::UnsupportedFormat);
  io::Bytes cut = bytes;
  cut.resize(cut.size() - 3);
  CHECK_ERROR(io::decode_npy(cut), ErrorKind::CorruptFile);
}

TEST_CASE("raw image and map files") {
  TempDir dir;
  pp::Image img(6, 4);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<double>(i) / 23.0;
  io::write_raw_image(img, dir.path / "a.npy");
  CHECK(io::read_raw_image(dir.path / "a.npy").pixels.data == img.data);
  io::write_raw_image(img, dir.path / "a.pgm", 1.0, 4095);
  const auto pgm = io::read_raw_image(dir.path / "a.pgm");
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(std::abs(pgm.pixels.data[i] - img.data[i]) <= 0.5 / 4095 + 1e-15);
  io::write_raw_image(img, dir.path / "a.png");
  CHECK(io::read_raw_image(dir.path / "a.png").bit_depth == 16);
  CHECK_ERROR(io::write_raw_image(img, dir.path / "a.tif"), ErrorKind::UnsupportedFormat);
  CHECK_ERROR(io::read_raw_image(dir.path / "missing.png"), ErrorKind::IoError);

  pp::Image rgb(3, 2, 3);
  for (std::size_t i = 0; i < rgb.data.size(); ++i) rgb.data[i] = 0.25 * static_cast<double>(i);
  for (const char* name : {"m.pfm", "m.npy"}) {
    io::write_real_map(rgb, dir.path / name);
    const auto back = io::read_real_map(dir.path / name);
    CHECK(back.channels == 3);
    CHECK(back.data == rgb.data);
  }

  pp::Mask mask(4, 2);
  mask.data = {0, 255, 255, 0, 1, 2, 3, 4};
  io::write_mask_png(mask, dir.path / "mask.png");
  CHECK(io::read_mask_png(dir.path / "mask.png").data == mask.data);
}

TEST_CASE("intrinsics documents") {
  const auto k = io::parse_intrinsics(io::Json::parse(R"({"fx":100,"fy":110,"cx":3,"cy":4,"width":8,"height":9})"));
  CHECK(k.skew == 0.0);
  CHECK(k.pixel_offset == 0.0);
  CHECK(k.fy == 110.0);
  const auto again = io::parse_intrinsics(io::to_json(k));
  CHECK(again.cx == k.cx);
  const std::string bad = testing::error_message(
      [] { io::parse_intrinsics(io::Json::parse(R"({"fx":-1,"fy":1,"cx":0,"cy":0,"width":1,"height":1})")); });
  CHECK(bad.find("fx") != std::string::npos);
  CHECK_ERROR(io::parse_intrinsics(io::Json::parse(R"({"fx":-1,"fy":1,"cx":0,"cy":0,"width":1,"height":1})")),
              ErrorKind::SchemaError);
  const auto extra = io::Json::parse(R"({"fx":1,"fy":1,"cx":0,"cy":0,"width":1,"height":1,"lens":"x"})");
  CHECK_NOTHROW(io::parse_intrinsics(extra, false));
  CHECK_ERROR(io::parse_intrinsics(extra, true), ErrorKind::SchemaError);
  CHECK_ERROR(io::parse_intrinsics(io::Json::parse(R"({"fx":1,"fy":1,"cx":0,"cy":0,"width":1.5,"height":1})")),
              ErrorKind::SchemaError);
}

TEST_CASE("capture manifests") {
  TempDir dir;
  pp::Image img(4, 4, 1, 0.25);
  for (const char* name : {"a.npy", "b.npy", "c.npy"}) io::write_raw_image(img, dir.path / name);
  auto doc = io::Json::parse(R"({"kind":"multishot","images":[{"path":"a.npy","angle_deg":0},{"path":"b.npy","angle_deg":180}]})");
  CHECK(testing::error_message([&] { io::parse_manifest(doc, dir.path); }).find("angles: need >= 3 distinct mod 180") !=
        std::string::npos);
  doc["images"].push_back({{"path", "c.npy"}, {"angle_deg", 60}});
  doc["images"].push_back({{"path", "b.npy"}, {"angle_deg", 120}});
  const auto m = io::parse_manifest(doc, dir.path);
  CHECK(m.paths.size() == 4);
  CHECK(m.paths[2] == dir.path / "c.npy");
  const auto capture = io::load_capture(m);
  CHECK(capture.images.size() == 4);
  CHECK(capture.images[0].data[0] == 0.25);
  CHECK(io::parse_manifest(io::to_json(m, dir.path), dir.path).paths == m.paths);

  doc["images"][1]["path"] = "nope.npy";
  CHECK(testing::error_message([&] { io::parse_manifest(doc, dir.path); }).find("images[1].path") != std::string::npos);
  doc["images"][1]["path"] = "b.npy";
  doc["note"] = "x";
  CHECK_NOTHROW(io::parse_manifest(doc, dir.path));
  CHECK_ERROR(io::parse_manifest(doc, dir.path, true), ErrorKind::SchemaError);
  CHECK_ERROR(io::parse_manifest(io::Json::parse(R"({"kind":"video"})"), dir.path), ErrorKind::SchemaError);
}

TEST_CASE("scene documents") {
  const auto doc = io::Json::parse(R"({
    "geometry": {"type": "plane", "tilt_deg": 30, "azimuth_deg": 15, "distance": 2},
    "mode": "diffuse",
    "model": {"n": 1.6, "a": 0.8},
    "noise": {"gaussian_sigma": 0.01, "quantization_bits": 12, "seed": 9},
    "sensor": {"kind": "mosaic"}
  })");
  const auto scene = io::parse_scene(doc);
  const auto& plane = std::get<pp::PlaneGeometry>(scene.scene.geometry);
  CHECK(plane.normal.z() == doctest::Approx(-std::cos(pp::kPi / 6)));
  CHECK(scene.scene.mode == pp::ReflectionMode::Diffuse);
  CHECK(scene.noise.seed == 9);
  CHECK(std::holds_alternative<pp::MosaicLayout>(scene.sensor));
  const auto again = io::parse_scene(io::to_json(scene));
  CHECK((std::get<pp::PlaneGeometry>(again.scene.geometry).normal - plane.normal).norm() < 1e-12);
  CHECK(again.noise.quantization_bits == 12);

  auto bad = doc;
  bad["model"]["n"] = 0.9;
  CHECK(testing::error_message([&] { io::parse_scene(bad); }).find("model.n") != std::string::npos);
  bad = doc;
  bad["sensor"] = {{"kind", "multishot"}, {"angles_deg", {0, 90}}};
  CHECK_ERROR(io::parse_scene(bad), ErrorKind::SchemaError);
}
