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

#pragma once

#include <polarproj/io.hpp>
#include <polarproj/rayframes.hpp>
#include <polarproj/sfp.hpp>
#include <polarproj/stokes.hpp>

#include <optional>
#include <string>
#include <vector>

namespace polarproj::cli {

namespace fs = std::filesystem;

/// Raised for invalid flag combinations; reported as "UsageError: ...".
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FramesOptions {
  fs::path intrinsics;
  std::optional<fs::path> out;
  std::vector<double> angles_deg = {0, 45, 90, 135};
  std::optional<double> pixel_offset;
  std::optional<std::string> probe;
};

struct EstimateOptions {
  fs::path manifest;
  fs::path out;
  std::optional<fs::path> intrinsics;
  std::string pipeline = "projective";
  std::optional<int> window;
  bool eff_angle_at_center = false;
  std::optional<double> pixel_offset;
  std::optional<std::string> saturation;
  double gamma = 1.0;
  std::optional<fs::path> mask_out;
};

struct SynthesizeOptions {
  fs::path stokes;
  fs::path out;
  std::string format = "png";
  std::optional<double> full_scale;
};

struct NormalsOptions {
  fs::path stokes;
  fs::path out;
  std::string mode = "specular";
  std::optional<std::string> branch;
  double n = 1.5;
  double a = 1.0;
  std::optional<fs::path> oracle;
  std::optional<std::string> oracle_normal;
  std::optional<fs::path> mask_out;
};

struct PlaneOptions {
  fs::path stokes;
  std::optional<std::string> pipeline;
  std::optional<fs::path> mask;
  double min_dolp = kMinDolp;
  std::optional<std::string> truth_normal;
  std::optional<fs::path> report;
};

struct SimulateOptions {
  fs::path scene;
  fs::path intrinsics;
  fs::path out;
  std::string raw_format = "npy";
  std::optional<std::uint64_t> seed;
  std::optional<double> pixel_offset;
};

struct EvaluateOptions {
  fs::path gt;
  fs::path stokes;
  std::optional<fs::path> normals;
  fs::path report;
  std::optional<fs::path> heatmap;
};

void cmd_frames(const FramesOptions& o);
void cmd_estimate(const EstimateOptions& o);
void cmd_synthesize(const SynthesizeOptions& o);
void cmd_normals(const NormalsOptions& o);
void cmd_plane(const PlaneOptions& o);
void cmd_simulate(const SimulateOptions& o);
void cmd_evaluate(const EvaluateOptions& o);

}  // namespace polarproj::cli
