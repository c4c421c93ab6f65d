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

// File formats: PFM float maps, NPY float64 arrays, 8/16-bit PGM and PNG
// rasters, and the JSON documents (intrinsics, capture manifests, scenes,
// reports).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "polarproj/raster.hpp"
#include "polarproj/rayframes.hpp"
#include "polarproj/sfp.hpp"
#include "polarproj/sim.hpp"
#include "polarproj/stokes.hpp"

namespace polarproj::io {

namespace fs = std::filesystem;
using Json = nlohmann::json;
using Bytes = std::vector<std::uint8_t>;

Bytes read_file(const fs::path& path);               // IoError
void write_file(const fs::path& path, std::span<const std::uint8_t> bytes);

// ---- PFM -------------------------------------------------------------------

struct FloatMap {
  int width = 0;
  int height = 0;
  int channels = 1;          // 1 ("Pf") or 3 ("PF")
  std::vector<float> data;   // interleaved channels
  bool bottom_up = false;    // row order of `data`; readers always return top-down

  friend bool operator==(const FloatMap&, const FloatMap&) = default;
};

/// Little-endian payload (scale -1), rows written bottom-to-top.
/// Throws UnsupportedFormat for channel counts other than 1 or 3.
Bytes encode_pfm(const FloatMap& map);
/// Accepts either byte order. Throws UnsupportedFormat / CorruptFile.
FloatMap decode_pfm(std::span<const std::uint8_t> bytes);
void write_pfm(const FloatMap& map, const fs::path& path);
FloatMap read_pfm(const fs::path& path);

// ---- NPY (float64, C order) -------------------------------------------------

struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<double> data;
};

Bytes encode_npy(const NpyArray& array);
/// Accepts '<f8', '<f4', '<u2' and '|u1' in C order. Throws UnsupportedFormat / CorruptFile.
NpyArray decode_npy(std::span<const std::uint8_t> bytes);

// ---- raw intensity rasters --------------------------------------------------

struct RawImage {
  Image pixels;         // samples / maxval, in [0, 1]
  int bit_depth = 16;   // 8 or 16; 64 for float files
  unsigned maxval = 65535;
};

/// Binary PGM (P5), maxval <= 65535. ASCII P2 is UnsupportedFormat.
RawImage decode_pgm(std::span<const std::uint8_t> bytes);
Bytes encode_pgm(const Raster<std::uint16_t>& image, unsigned maxval);

/// 8- or 16-bit single-channel PNG.
RawImage decode_png(std::span<const std::uint8_t> bytes);
Bytes encode_png(const Raster<std::uint16_t>& image, int bit_depth);

/// Dispatches on the file signature: PNG, PGM (P5) or NPY (samples kept as stored).
RawImage read_raw_image(const fs::path& path);

/// Writes `image` (values in [0, full_scale]) quantized to `maxval` levels as
/// PGM or PNG, or losslessly as NPY, by extension.
void write_raw_image(const Image& image, const fs::path& path, double full_scale = 1.0, unsigned maxval = 65535);

// ---- real-valued maps --------------------------------------------------------

/// .pfm (float32, 1 or 3 channels) or .npy (float64, any channel count).
void write_real_map(const Image& map, const fs::path& path);
Image read_real_map(const fs::path& path);

void write_mask_png(const Mask& mask, const fs::path& path);
Mask read_mask_png(const fs::path& path);

// ---- JSON documents ---------------------------------------------------------

Json read_json(const fs::path& path);  // IoError / SchemaError
void write_json(const Json& doc, const fs::path& path);

/// Strict mode rejects unknown fields. Throws SchemaError("<field>: ...").
Intrinsics parse_intrinsics(const Json& doc, bool strict = false);
Json to_json(const Intrinsics& k);
Intrinsics read_intrinsics(const fs::path& path, bool strict = false);

struct Manifest {
  CaptureKind kind = CaptureKind::Multishot;
  std::vector<fs::path> paths;      // resolved against the manifest directory
  std::vector<double> angles_deg;   // multishot
  MosaicLayout layout = MosaicLayout::imx250mzr();
  std::optional<fs::path> intrinsics;
  std::optional<double> saturation;
  bool saturation_from_file = false;  // "saturation": "auto"
};

Manifest parse_manifest(const Json& doc, const fs::path& base_dir, bool strict = false);
Manifest read_manifest(const fs::path& path, bool strict = false);
Json to_json(const Manifest& manifest, const fs::path& base_dir);

struct CaptureLoadOptions {
  double gamma = 1.0;  // samples are raised to this power after scaling
  std::optional<double> saturation;  // overrides the manifest
  bool saturation_from_file = false;
};

RawCapture load_capture(const Manifest& manifest, const CaptureLoadOptions& options = {});

MosaicLayout parse_layout(const Json& doc, const std::string& where, bool strict = false);
Json to_json(const MosaicLayout& layout);

struct SceneDocument {
  SceneSpec scene;
  NoiseSpec noise;
  SensorSpec sensor = MultishotSensor{{0.0, kPi / 4, kPi / 2, 3 * kPi / 4}};
};

SceneDocument parse_scene(const Json& doc, bool strict = false);
Json to_json(const SceneDocument& doc);

Json to_json(const ErrorStats& stats);
/// {"normal":[x,y,z], "residual", "count", "mae_deg", "rmse_deg", "std_deg"}.
Json plane_report(const PlaneEstimate& plane, const std::optional<ErrorStats>& error);

}  // namespace polarproj::io
