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

#include <CLI11.hpp>

#include <polarproj/config.hpp>
#include <polarproj/error.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "commands.hpp"

namespace {

using polarproj::ErrorKind;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SchemaError:
    case ErrorKind::UnsupportedFormat:
    case ErrorKind::CorruptFile:
    case ErrorKind::IoError:
    case ErrorKind::LayoutMismatch:
      return 2;
    case ErrorKind::DegenerateSystem:
    case ErrorKind::DegenerateRay:
    case ErrorKind::DegeneratePolarizer:
    case ErrorKind::InvisiblePlane:
      return 4;
    default:
      return 3;
  }
}

void one_line(std::string& message) {
  for (char& c : message)
    if (c == '\n' || c == '\r') c = ' ';
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = polarproj::cli;
  CLI::App app{"Polarization imaging with per-pixel ray frames for projective cameras"};
  app.require_subcommand(1);
  app.fallthrough();

  bool strict = false;
  int threads = 0;
  app.add_flag("--strict", strict, "Reject unknown config fields and unrealizable Stokes estimates (also POLARPROJ_STRICT=1)");
  app.add_option("--threads", threads, "Cap on worker threads; 1 gives bit-reproducible reductions")->check(CLI::NonNegativeNumber);

  cli::FramesOptions frames;
  auto* c_frames = app.add_subcommand("frames", "Write per-pixel ray frames and effective polarizer angles");
  c_frames->add_option("--intrinsics", frames.intrinsics, "Intrinsics JSON")->required();
  c_frames->add_option("--out", frames.out, "Output directory for rx/ry/rz and eff_<deg> PFM maps");
  c_frames->add_option("--angles", frames.angles_deg, "Nominal polarizer angles in degrees")->delimiter(',');
  c_frames->add_option("--pixel-offset", frames.pixel_offset, "Sample position inside each pixel (0.0 or 0.5)");
  c_frames->add_option("--probe", frames.probe, "Print effective angles for the ray through pixel u,v");

  cli::EstimateOptions est;
  auto* c_est = app.add_subcommand("estimate", "Estimate a Stokes map from a raw capture");
  c_est->add_option("--manifest", est.manifest, "Capture manifest JSON")->required();
  c_est->add_option("--out", est.out, "Stokes map (.pfm or .npy); a .json sidecar is written next to it")->required();
  c_est->add_option("--intrinsics", est.intrinsics, "Intrinsics JSON (overrides the manifest)");
  c_est->add_option("--pipeline", est.pipeline, "ortho or projective")->capture_default_str();
  c_est->add_option("--window", est.window, "Demosaic neighbourhood size H for mosaic captures (default 2)");
  c_est->add_flag("--eff-angle-at-center", est.eff_angle_at_center,
                  "Evaluate effective angles at the window centre instead of at each photosite");
  c_est->add_option("--pixel-offset", est.pixel_offset, "Sample position inside each pixel (0.0 or 0.5)");
  c_est->add_option("--saturation", est.saturation, "Saturation level in normalized units, or \"auto\" for file maxval");
  c_est->add_option("--gamma", est.gamma, "Raise normalized samples to this power before solving")->capture_default_str();
  c_est->add_option("--mask-out", est.mask_out, "Status mask PNG (default <out>_mask.png)");

  cli::SynthesizeOptions syn;
  auto* c_syn = app.add_subcommand("synthesize", "Synthesize ideal 0/45/90/135 polarizer images from a Stokes map");
  c_syn->add_option("--stokes", syn.stokes, "Local-frame Stokes map")->required();
  c_syn->add_option("--out", syn.out, "Output directory")->required();
  c_syn->add_option("--format", syn.format, "png, pgm or npy")->capture_default_str();
  c_syn->add_option("--full-scale", syn.full_scale, "Intensity mapped to the maximum sample (default: max s0)");

  cli::NormalsOptions nor;
  auto* c_nor = app.add_subcommand("normals", "Recover camera-frame surface normals from a Stokes map");
  c_nor->add_option("--stokes", nor.stokes, "Stokes map")->required();
  c_nor->add_option("--out", nor.out, "Normal map (.pfm or .npy)")->required();
  c_nor->add_option("--mode", nor.mode, "specular or diffuse")->capture_default_str();
  c_nor->add_option("--branch", nor.branch, "Zenith branch: low (default) or high");
  c_nor->add_option("--n", nor.n, "Refractive index of the specular DoLP model")->capture_default_str();
  c_nor->add_option("--a", nor.a, "Scale of the specular DoLP model")->capture_default_str();
  c_nor->add_option("--oracle", nor.oracle, "Ground-truth normal map used to pick among candidates");
  c_nor->add_option("--oracle-normal", nor.oracle_normal, "Ground-truth normal x,y,z or a JSON file with \"normal\"");
  c_nor->add_option("--mask-out", nor.mask_out, "Validity mask PNG (default <out>_mask.png)");

  cli::PlaneOptions pla;
  auto* c_pla = app.add_subcommand("plane", "Fit a plane normal to an AoLP field");
  c_pla->add_option("--stokes", pla.stokes, "Stokes map")->required();
  c_pla->add_option("--pipeline", pla.pipeline, "ortho or projective frames (default: follows the map frame)");
  c_pla->add_option("--mask", pla.mask, "Optional PNG; nonzero pixels are used");
  c_pla->add_option("--min-dolp", pla.min_dolp, "Pixels below this DoLP are ignored")->capture_default_str();
  c_pla->add_option("--truth-normal", pla.truth_normal, "Reference normal x,y,z or a JSON file with \"normal\"");
  c_pla->add_option("--report", pla.report, "JSON report path");

  cli::SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Render a synthetic capture with ground truth");
  c_sim->add_option("--scene", sim.scene, "Scene JSON (geometry, model, noise, sensor)")->required();
  c_sim->add_option("--intrinsics", sim.intrinsics, "Intrinsics JSON")->required();
  c_sim->add_option("--out", sim.out, "Output directory")->required();
  c_sim->add_option("--raw-format", sim.raw_format, "pgm, png or npy")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Noise seed (overrides the scene)");
  c_sim->add_option("--pixel-offset", sim.pixel_offset, "Sample position inside each pixel (0.0 or 0.5)");

  cli::EvaluateOptions eva;
  auto* c_eva = app.add_subcommand("evaluate", "Compare estimates with simulated ground truth");
  c_eva->add_option("--gt", eva.gt, "Ground-truth directory written by simulate")->required();
  c_eva->add_option("--stokes", eva.stokes, "Estimated Stokes map")->required();
  c_eva->add_option("--normals", eva.normals, "Estimated camera-frame normal map");
  c_eva->add_option("--report", eva.report, "JSON metrics report")->required();
  c_eva->add_option("--heatmap", eva.heatmap, "Per-pixel AoLP error (degrees) as a PFM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    one_line(msg);
    std::fprintf(stderr, "UsageError: %s\n", msg.c_str());
    return 2;
  }

  try {
    if (strict) polarproj::set_strict_mode(true);
    polarproj::set_thread_limit(threads);
    if (*c_frames) cli::cmd_frames(frames);
    else if (*c_est) cli::cmd_estimate(est);
    else if (*c_syn) cli::cmd_synthesize(syn);
    else if (*c_nor) cli::cmd_normals(nor);
    else if (*c_pla) cli::cmd_plane(pla);
    else if (*c_sim) cli::cmd_simulate(sim);
    else if (*c_eva) cli::cmd_evaluate(eva);
  } catch (const polarproj::Error& e) {
    std::string msg = e.what();
    one_line(msg);
    std::fprintf(stderr, "%s\n", msg.c_str());
    return exit_code(e.kind());
  } catch (const cli::UsageError& e) {
    std::string msg = e.what();
    one_line(msg);
    std::fprintf(stderr, "UsageError: %s\n", msg.c_str());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::string msg = e.what();
    one_line(msg);
    std::fprintf(stderr, "IoError: %s\n", msg.c_str());
    return 2;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    one_line(msg);
    std::fprintf(stderr, "InternalError: %s\n", msg.c_str());
    return 3;
  }
  return 0;
}
