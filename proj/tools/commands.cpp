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

#include "commands.hpp"

#include <polarproj/config.hpp>
#include <polarproj/error.hpp>
#include <polarproj/sim.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace polarproj::cli {

namespace {

using io::Json;

constexpr double kDeg = kPi / 180.0;

std::string angle_tag(double degrees) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03g", degrees);
  std::string s = buf;
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

fs::path sidecar_of(const fs::path& map) { return fs::path(map).replace_extension(".json"); }

fs::path default_mask_of(const fs::path& map) {
  return map.parent_path() / (map.stem().string() + "_mask.png");
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path() && !path.parent_path().empty()) fs::create_directories(path.parent_path());
}

std::string frame_name(FrameConvention f) { return f == FrameConvention::Local ? "local" : "camera"; }

FrameConvention parse_frame(const Json& doc) {
  const auto it = doc.find("frame");
  if (it == doc.end() || !it->is_string()) fail(ErrorKind::SchemaError, "frame: missing in map sidecar");
  if (*it == "local") return FrameConvention::Local;
  if (*it == "camera") return FrameConvention::Camera;
  fail(ErrorKind::SchemaError, "frame: must be \"local\" or \"camera\"");
}

Eigen::Vector3d parse_vector(const std::string& text, const char* flag) {
  if (fs::exists(text)) {
    const Json doc = io::read_json(text);
    const auto it = doc.find("normal");
    if (it == doc.end() || !it->is_array() || it->size() != 3) fail(ErrorKind::SchemaError, "normal: missing in " + text);
    Eigen::Vector3d v((*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>());
    return v.normalized();
  }
  std::stringstream ss(text);
  Eigen::Vector3d v;
  char sep = 0;
  if (!(ss >> v.x() >> sep >> v.y() >> sep >> v.z()) || !(v.norm() > 0.0))
    throw UsageError(std::string(flag) + " expects x,y,z or a JSON file with a \"normal\" field");
  return v.normalized();
}

Image stokes_image(const StokesMap& map) {
  Image out(map.width(), map.height(), 3);
  for (std::size_t j = 0; j < map.pixel_count(); ++j) {
    out.data[3 * j] = map.stokes[j].s0;
    out.data[3 * j + 1] = map.stokes[j].s1;
    out.data[3 * j + 2] = map.stokes[j].s2;
  }
  return out;
}

Image vector_image(const std::vector<Eigen::Vector3d>& v, int width, int height) {
  Image out(width, height, 3);
  for (std::size_t j = 0; j < v.size(); ++j)
    for (int c = 0; c < 3; ++c) out.data[3 * j + static_cast<std::size_t>(c)] = v[j][c];
  return out;
}

Image scalar_image(const std::vector<double>& v, int width, int height) {
  Image out(width, height);
  out.data = v;
  return out;
}

Mask flag_mask(const std::vector<std::uint8_t>& flags, int width, int height, unsigned char on = 255) {
  Mask out(width, height);
  for (std::size_t j = 0; j < flags.size(); ++j) out.data[j] = flags[j] ? on : 0;
  return out;
}

Json status_counts(const StokesMap& map) {
  return Json{{"valid", map.count(PixelStatus::Valid)},
              {"rank_deficient", map.count(PixelStatus::RankDeficient)},
              {"saturated", map.count(PixelStatus::Saturated)},
              {"clamped", map.count(PixelStatus::Clamped)},
              {"unrealizable", map.count(PixelStatus::Unrealizable)}};
}

void write_stokes_map(const StokesMap& map, const fs::path& out, const std::string& pipeline, const fs::path& mask_path) {
  ensure_parent(out);
  io::write_real_map(stokes_image(map), out);
  Mask status(map.width(), map.height());
  for (std::size_t j = 0; j < map.pixel_count(); ++j) status.data[j] = static_cast<unsigned char>(map.status[j]);
  ensure_parent(mask_path);
  io::write_mask_png(status, mask_path);
  Json side{{"frame", frame_name(map.frame)},
            {"pipeline", pipeline},
            {"intrinsics", io::to_json(map.intrinsics)},
            {"status_mask", fs::relative(mask_path, out.parent_path().empty() ? "." : out.parent_path()).generic_string()},
            {"status", status_counts(map)}};
  io::write_json(side, sidecar_of(out));
}

StokesMap read_stokes_map(const fs::path& path, Json* sidecar_out = nullptr) {
  const fs::path side_path = sidecar_of(path);
  if (!fs::exists(side_path)) fail(ErrorKind::SchemaError, "stokes: sidecar not found: " + side_path.string());
  const Json side = io::read_json(side_path);
  if (!side.contains("intrinsics")) fail(ErrorKind::SchemaError, "intrinsics: missing in " + side_path.string());
  StokesMap map;
  map.intrinsics = io::parse_intrinsics(side.at("intrinsics"));
  map.frame = parse_frame(side);
  const Image img = io::read_real_map(path);
  if (img.channels != 3) fail(ErrorKind::SchemaError, "stokes: map must have 3 channels (s0, s1, s2)");
  if (!img.same_shape(map.intrinsics.width, map.intrinsics.height))
    fail(ErrorKind::SchemaError, "stokes: map size differs from its intrinsics");
  map.stokes.resize(img.pixel_count());
  for (std::size_t j = 0; j < map.stokes.size(); ++j)
    map.stokes[j] = {img.data[3 * j], img.data[3 * j + 1], img.data[3 * j + 2], 0.0};
  map.status.assign(map.stokes.size(), PixelStatus::Valid);
  if (const auto it = side.find("status_mask"); it != side.end() && it->is_string()) {
    const Mask status = io::read_mask_png(path.parent_path() / it->get<std::string>());
    if (!status.same_shape(img.width, img.height)) fail(ErrorKind::SchemaError, "status_mask: size differs from the map");
    for (std::size_t j = 0; j < map.status.size(); ++j) {
      if (status.data[j] > 4) fail(ErrorKind::SchemaError, "status_mask: unknown status code");
      map.status[j] = static_cast<PixelStatus>(status.data[j]);
    }
  }
  if (sidecar_out) *sidecar_out = side;
  return map;
}

void write_normal_field(const NormalField& field, const fs::path& out, const fs::path& mask_path, const std::string& selection) {
  ensure_parent(out);
  io::write_real_map(vector_image(field.normals, field.width, field.height), out);
  ensure_parent(mask_path);
  io::write_mask_png(flag_mask(field.valid, field.width, field.height), mask_path);
  io::write_json(Json{{"frame", frame_name(field.frame)},
                      {"selection", selection},
                      {"mask", fs::relative(mask_path, out.parent_path().empty() ? "." : out.parent_path()).generic_string()}},
                 sidecar_of(out));
}

NormalField read_normal_field(const fs::path& path, std::optional<FrameConvention> frame = {}) {
  const Image img = io::read_real_map(path);
  if (img.channels != 3) fail(ErrorKind::SchemaError, "normals: map must have 3 channels");
  NormalField field;
  field.width = img.width;
  field.height = img.height;
  field.frame = FrameConvention::Camera;
  field.normals.resize(img.pixel_count());
  field.valid.assign(img.pixel_count(), 0);
  for (std::size_t j = 0; j < field.normals.size(); ++j) {
    field.normals[j] = {img.data[3 * j], img.data[3 * j + 1], img.data[3 * j + 2]};
    field.valid[j] = field.normals[j].norm() > 0.5 ? 1 : 0;
  }
  const fs::path side_path = sidecar_of(path);
  if (fs::exists(side_path)) {
    const Json side = io::read_json(side_path);
    field.frame = parse_frame(side);
    if (const auto it = side.find("mask"); it != side.end() && it->is_string()) {
      const Mask mask = io::read_mask_png(path.parent_path() / it->get<std::string>());
      if (!mask.same_shape(img.width, img.height)) fail(ErrorKind::SchemaError, "mask: size differs from the normal map");
      for (std::size_t j = 0; j < field.valid.size(); ++j) field.valid[j] = field.valid[j] && mask.data[j] != 0;
    }
  }
  if (frame) field.frame = *frame;
  return field;
}

std::vector<double> aolp_map(const StokesMap& map) {
  std::vector<double> out(map.pixel_count(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto& s = map.stokes[j];
    if (s.s1 != 0.0 || s.s2 != 0.0) out[j] = aolp(s);
  }
  return out;
}

double safe_dolp(const StokesVector& s) {
  if (!(s.s0 > 0.0)) return 0.0;
  return std::hypot(s.s1, s.s2) / s.s0;
}

}  // namespace

// ---- frames ----------------------------------------------------------------

void cmd_frames(const FramesOptions& o) {
  Intrinsics k = io::read_intrinsics(o.intrinsics, strict_mode());
  if (o.pixel_offset) k.pixel_offset = *o.pixel_offset;
  k.validate();
  std::vector<double> angles;
  for (double d : o.angles_deg) angles.push_back(d * kDeg);
  if (angles.empty()) throw UsageError("--angles needs at least one angle");

  if (o.probe) {
    std::stringstream ss(*o.probe);
    double u = 0, v = 0;
    char sep = 0;
    if (!(ss >> u >> sep >> v) || sep != ',') throw UsageError("--probe expects u,v");
    const RayFrame frame = local_frame(backproject(k, {u, v}));
    std::printf("probe u=%.6g v=%.6g tilt_deg=%.9f\n", u, v, std::acos(std::clamp(frame.z().z(), -1.0, 1.0)) / kDeg);
    for (std::size_t i = 0; i < angles.size(); ++i) {
      double hat = effective_angle(frame, angles[i]) / kDeg;
      if (180.0 - hat < 1e-9) hat -= 180.0;
      std::printf("alpha_deg=%.9f alpha_hat_deg=%.9f\n", o.angles_deg[i], hat);
    }
  }
  if (!o.out) {
    if (!o.probe) throw UsageError("frames needs --out or --probe");
    return;
  }
  fs::create_directories(*o.out);
  const auto field = RayFrameField::projective(k, RayFrameField::Storage::Lazy);
  const std::size_t count = field.pixel_count();
  for (int axis = 0; axis < 3; ++axis) {
    io::FloatMap map{k.width, k.height, 3, std::vector<float>(count * 3), false};
    for (std::size_t j = 0; j < count; ++j) {
      const Eigen::Vector3d col = field.at(j).rotation.col(axis);
      for (int c = 0; c < 3; ++c) map.data[3 * j + static_cast<std::size_t>(c)] = static_cast<float>(col[c]);
    }
    io::write_pfm(map, *o.out / (std::string("r") + "xyz"[axis] + ".pfm"));
  }
  const auto eff = build_effective_angles(field, angles);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    io::FloatMap map{k.width, k.height, 1, std::vector<float>(count), false};
    for (std::size_t j = 0; j < count; ++j) map.data[j] = static_cast<float>(eff.at(j, i) / kDeg);
    io::write_pfm(map, *o.out / ("eff_" + angle_tag(o.angles_deg[i]) + ".pfm"));
  }
  std::printf("wrote %zu frame maps and %zu effective-angle maps (%dx%d) to %s\n", std::size_t{3}, angles.size(), k.width,
              k.height, o.out->string().c_str());
}

// ---- estimate --------------------------------------------------------------

void cmd_estimate(const EstimateOptions& o) {
  if (o.pipeline != "projective" && o.pipeline != "ortho") throw UsageError("--pipeline must be ortho or projective");
  if (o.eff_angle_at_center && o.pipeline == "ortho")
    throw UsageError("--eff-angle-at-center cannot be combined with --pipeline ortho");
  if (o.window && *o.window < 1) throw UsageError("--window must be >= 1");
  if (!(o.gamma > 0.0)) throw UsageError("--gamma must be > 0");

  const io::Manifest manifest = io::read_manifest(o.manifest, strict_mode());
  if (manifest.kind == CaptureKind::Multishot && (o.window || o.eff_angle_at_center))
    throw UsageError(std::string(o.window ? "--window" : "--eff-angle-at-center") +
                     " applies to mosaic captures only, but the manifest kind is multishot");
  io::CaptureLoadOptions load;
  load.gamma = o.gamma;
  if (o.saturation) {
    if (*o.saturation == "auto") {
      load.saturation_from_file = true;
    } else {
      try {
        std::size_t used = 0;
        load.saturation = std::stod(*o.saturation, &used);
        if (used != o.saturation->size() || !(*load.saturation > 0.0)) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw UsageError("--saturation expects a positive level in [0, 1] units or \"auto\"");
      }
    }
  }
  const RawCapture capture = io::load_capture(manifest, load);

  std::optional<Intrinsics> k;
  if (o.intrinsics) k = io::read_intrinsics(*o.intrinsics, strict_mode());
  else if (manifest.intrinsics) k = io::read_intrinsics(*manifest.intrinsics, strict_mode());
  if (!k) {
    if (o.pipeline == "projective") fail(ErrorKind::SchemaError, "intrinsics: required for --pipeline projective");
    Intrinsics guess;
    guess.width = capture.width();
    guess.height = capture.height();
    guess.cx = (guess.width - 1) / 2.0;
    guess.cy = (guess.height - 1) / 2.0;
    k = guess;
  }
  if (o.pixel_offset) k->pixel_offset = *o.pixel_offset;
  if (k->width != capture.width() || k->height != capture.height())
    fail(ErrorKind::SchemaError, "intrinsics: " + std::to_string(k->width) + "x" + std::to_string(k->height) +
                                     " does not match the capture size " + std::to_string(capture.width()) + "x" +
                                     std::to_string(capture.height()));

  DemosaicOptions demosaic;
  if (o.window) demosaic.window = *o.window;
  demosaic.eff_angle_at_center = o.eff_angle_at_center;

  StokesMap map;
  if (o.pipeline == "ortho") {
    map = estimate_stokes_orthographic(capture, *k, demosaic);
  } else {
    const auto frames = RayFrameField::projective(*k, RayFrameField::Storage::Lazy);
    const auto eff = build_effective_angles(frames, capture.nominal_angles());
    map = capture.kind == CaptureKind::Mosaic ? estimate_stokes_dofp(capture, eff, demosaic)
                                              : estimate_stokes_multishot(capture, eff);
  }
  write_stokes_map(map, o.out, o.pipeline, o.mask_out ? *o.mask_out : default_mask_of(o.out));
  std::printf("valid=%zu rank_deficient=%zu saturated=%zu clamped=%zu unrealizable=%zu\n", map.count(PixelStatus::Valid),
              map.count(PixelStatus::RankDeficient), map.count(PixelStatus::Saturated), map.count(PixelStatus::Clamped),
              map.count(PixelStatus::Unrealizable));
}

// ---- synthesize ------------------------------------------------------------

void cmd_synthesize(const SynthesizeOptions& o) {
  if (o.format != "png" && o.format != "pgm" && o.format != "npy") throw UsageError("--format must be png, pgm or npy");
  if (o.full_scale && !(*o.full_scale > 0.0)) throw UsageError("--full-scale must be > 0");
  const StokesMap map = read_stokes_map(o.stokes);
  const auto images = synthesize_ideal_images(map);
  double scale = 0.0;
  if (o.full_scale) {
    scale = *o.full_scale;
  } else {
    for (std::size_t j = 0; j < map.pixel_count(); ++j)
      if (usable(map.status[j])) scale = std::max(scale, map.stokes[j].s0);
    if (!(scale > 0.0)) scale = 1.0;
  }
  fs::create_directories(o.out);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const fs::path path = o.out / ("ideal_" + angle_tag(kPfaAngles[i] / kDeg) + "." + o.format);
    io::write_raw_image(images[i], path, scale);
  }
  std::printf("wrote %zu ideal-polarizer images to %s (full scale %.9g)\n", images.size(), o.out.string().c_str(), scale);
}

// ---- normals ---------------------------------------------------------------

void cmd_normals(const NormalsOptions& o) {
  if (o.mode != "specular" && o.mode != "diffuse") throw UsageError("--mode must be specular or diffuse");
  if (o.branch && *o.branch != "low" && *o.branch != "high") throw UsageError("--branch must be low or high");
  if (o.oracle && o.oracle_normal) throw UsageError("--oracle cannot be combined with --oracle-normal");
  if (o.branch && (o.oracle || o.oracle_normal))
    throw UsageError(std::string("--branch cannot be combined with ") + (o.oracle ? "--oracle" : "--oracle-normal") +
                     " (the oracle chooses among both branches)");
  if (!(o.n > 1.0)) throw UsageError("--n must be > 1");
  if (!(o.a > 0.0 && o.a <= 1.0)) throw UsageError("--a must be in (0, 1]");

  const StokesMap map = read_stokes_map(o.stokes);
  const SpecularDolpModel model{o.n, o.a};
  auto candidates = normals_local(map, model, o.mode == "diffuse" ? ReflectionMode::Diffuse : ReflectionMode::Specular);
  if (candidates.frame == FrameConvention::Local)
    candidates = rotate_normals_to_camera(std::move(candidates), RayFrameField::projective(map.intrinsics, RayFrameField::Storage::Lazy));

  NormalField chosen;
  std::string selection;
  if (o.oracle) {
    NormalField truth = read_normal_field(*o.oracle, FrameConvention::Camera);
    if (truth.width != map.width() || truth.height != map.height())
      fail(ErrorKind::SchemaError, "oracle: ground-truth normal map size differs from the Stokes map");
    chosen = oracle_disambiguate(candidates, truth);
    selection = "oracle";
  } else if (o.oracle_normal) {
    chosen = oracle_disambiguate(candidates, parse_vector(*o.oracle_normal, "--oracle-normal"));
    selection = "oracle";
  } else {
    const bool high = o.branch && *o.branch == "high";
    chosen = select_candidate(candidates, high ? 1 : 0);
    selection = high ? "high" : "low";
  }
  write_normal_field(chosen, o.out, o.mask_out ? *o.mask_out : default_mask_of(o.out), selection);
  const auto valid = static_cast<std::size_t>(std::count(chosen.valid.begin(), chosen.valid.end(), 1));
  std::printf("normals=%zu masked=%zu selection=%s\n", valid, chosen.pixel_count() - valid, selection.c_str());
}

// ---- plane -----------------------------------------------------------------

void cmd_plane(const PlaneOptions& o) {
  if (o.pipeline && *o.pipeline != "projective" && *o.pipeline != "ortho")
    throw UsageError("--pipeline must be ortho or projective");
  if (!(o.min_dolp >= 0.0)) throw UsageError("--min-dolp must be >= 0");
  const StokesMap map = read_stokes_map(o.stokes);
  const bool ortho = o.pipeline ? *o.pipeline == "ortho" : map.frame == FrameConvention::Camera;
  if (!ortho && map.frame == FrameConvention::Camera)
    fail(ErrorKind::FrameMismatch, "--pipeline projective needs a local-frame Stokes map; this one is in the camera frame");

  std::vector<std::uint8_t> mask(map.pixel_count(), 0);
  std::optional<Mask> user;
  if (o.mask) {
    user = io::read_mask_png(*o.mask);
    if (!user->same_shape(map.width(), map.height())) fail(ErrorKind::SchemaError, "mask: size differs from the Stokes map");
  }
  for (std::size_t j = 0; j < mask.size(); ++j)
    mask[j] = usable(map.status[j]) && safe_dolp(map.stokes[j]) >= o.min_dolp && (!user || user->data[j] != 0);

  const RayFrameField frames = ortho ? RayFrameField::orthographic(map.intrinsics)
                                     : RayFrameField::projective(map.intrinsics, RayFrameField::Storage::Lazy);
  const PlaneEstimate plane = estimate_plane_normal(aolp_map(map), frames, mask);
  std::optional<ErrorStats> error;
  if (o.truth_normal) {
    const double e = normal_error(plane.normal, parse_vector(*o.truth_normal, "--truth-normal"), AngleAmbiguity::None) / kDeg;
    error = ErrorStats{e, e, 0.0, 1};
  }
  const Json report = io::plane_report(plane, error);
  if (o.report) {
    ensure_parent(*o.report);
    io::write_json(report, *o.report);
  }
  std::printf("normal=%.12f,%.12f,%.12f residual=%.6g count=%zu", plane.normal.x(), plane.normal.y(), plane.normal.z(),
              plane.residual, plane.count);
  if (error) std::printf(" error_deg=%.6g", error->mae_deg);
  std::printf("\n");
}

// ---- simulate --------------------------------------------------------------

void cmd_simulate(const SimulateOptions& o) {
  if (o.raw_format != "npy" && o.raw_format != "pgm" && o.raw_format != "png")
    throw UsageError("--raw-format must be pgm, png or npy");
  io::SceneDocument doc = io::parse_scene(io::read_json(o.scene), strict_mode());
  if (o.seed) doc.noise.seed = *o.seed;
  Intrinsics k = io::read_intrinsics(o.intrinsics, strict_mode());
  if (o.pixel_offset) k.pixel_offset = *o.pixel_offset;
  k.validate();

  const Simulation sim = simulate_capture(doc.scene, k, doc.sensor, doc.noise);
  const fs::path gt_dir = o.out / "gt";
  fs::create_directories(gt_dir);

  const unsigned maxval = doc.noise.quantization_bits > 0 ? (1u << doc.noise.quantization_bits) - 1u : 65535u;
  io::Manifest manifest;
  manifest.kind = sim.capture.kind;
  manifest.layout = sim.capture.layout;
  for (std::size_t i = 0; i < sim.capture.images.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "raw_%02zu.%s", i, o.raw_format.c_str());
    const fs::path path = o.out / name;
    io::write_raw_image(sim.capture.images[i], path, doc.scene.s0_base, maxval);
    manifest.paths.push_back(path);
    if (sim.capture.kind == CaptureKind::Multishot) manifest.angles_deg.push_back(sim.capture.angles[i] / kDeg);
  }
  io::write_json(io::to_json(k), o.out / "intrinsics.json");
  manifest.intrinsics = o.out / "intrinsics.json";
  io::write_json(io::to_json(manifest, o.out), o.out / "manifest.json");

  const auto& gt = sim.truth;
  const std::string ext = o.raw_format == "npy" ? ".npy" : ".pfm";
  Json files;
  auto put = [&](const std::string& key, const Image& image) {
    const std::string name = key + ext;
    io::write_real_map(image, gt_dir / name);
    files[key] = name;
  };
  std::vector<StokesVector> stokes = gt.stokes;
  put("stokes", stokes_image(StokesMap{k, FrameConvention::Local, std::move(stokes), {}}));
  put("aolp", scalar_image(gt.aolp, k.width, k.height));
  put("dolp", scalar_image(gt.dolp, k.width, k.height));
  if (gt.has_normals) {
    put("normals", vector_image(gt.normals, k.width, k.height));
    put("zenith", scalar_image(gt.zenith, k.width, k.height));
    put("aolp_ortho", scalar_image(render_expected_aolp(doc.scene, k, AolpModel::Orthographic).aolp, k.width, k.height));
  }
  std::vector<std::uint8_t> valid(gt.visible.size());
  for (std::size_t j = 0; j < valid.size(); ++j) valid[j] = gt.visible[j] && !gt.clipped[j];
  io::write_mask_png(flag_mask(valid, k.width, k.height), gt_dir / "mask.png");
  files["mask"] = "mask.png";

  Json meta{{"scene", io::to_json(doc)},
            {"intrinsics", io::to_json(k)},
            {"files", files},
            {"aolp_frame", "local"},
            {"clipped_pixels", std::count(gt.clipped.begin(), gt.clipped.end(), 1)}};
  if (const auto* plane = std::get_if<PlaneGeometry>(&doc.scene.geometry))
    meta["normal"] = {plane->normal.x(), plane->normal.y(), plane->normal.z()};
  io::write_json(meta, gt_dir / "meta.json");
  std::printf("simulated %dx%d %s capture (%zu image%s) into %s\n", k.width, k.height,
              sim.capture.kind == CaptureKind::Mosaic ? "mosaic" : "multishot", sim.capture.images.size(),
              sim.capture.images.size() == 1 ? "" : "s", o.out.string().c_str());
}

// ---- evaluate --------------------------------------------------------------

namespace {

Json stats_json(const std::vector<double>& errors_rad) {
  if (errors_rad.empty()) return Json{{"mae_deg", nullptr}, {"rmse_deg", nullptr}, {"std_deg", nullptr}, {"count", 0}};
  return io::to_json(summarize_errors(errors_rad));
}

Image load_gt(const fs::path& dir, const Json& files, const std::string& key, int channels, const Intrinsics& k) {
  const auto it = files.find(key);
  if (it == files.end() || !it->is_string()) fail(ErrorKind::SchemaError, "files." + key + ": missing in meta.json");
  Image img = io::read_real_map(dir / it->get<std::string>());
  if (img.channels != channels || !img.same_shape(k.width, k.height))
    fail(ErrorKind::SchemaError, "files." + key + ": unexpected map shape");
  return img;
}

}  // namespace

void cmd_evaluate(const EvaluateOptions& o) {
  const Json meta = io::read_json(o.gt / "meta.json");
  if (!meta.contains("intrinsics") || !meta.contains("files")) fail(ErrorKind::SchemaError, "meta.json: needs intrinsics and files");
  const Intrinsics k = io::parse_intrinsics(meta.at("intrinsics"));
  const Json& files = meta.at("files");
  const StokesMap map = read_stokes_map(o.stokes);
  if (map.width() != k.width || map.height() != k.height)
    fail(ErrorKind::SchemaError, "stokes: map size differs from the ground truth");

  const bool camera = map.frame == FrameConvention::Camera;
  const std::string aolp_key = camera && files.contains("aolp_ortho") ? "aolp_ortho" : "aolp";
  const Image gt_aolp = load_gt(o.gt, files, aolp_key, 1, k);
  const Image gt_dolp = load_gt(o.gt, files, "dolp", 1, k);
  Mask gt_mask(k.width, k.height, 1, 255);
  if (files.contains("mask")) gt_mask = io::read_mask_png(o.gt / files.at("mask").get<std::string>());
  if (!gt_mask.same_shape(k.width, k.height)) fail(ErrorKind::SchemaError, "files.mask: size differs from the ground truth");

  const auto est_aolp = aolp_map(map);
  const double rx = std::max(k.cx, k.width - 1 - k.cx);
  const double ry = std::max(k.cy, k.height - 1 - k.cy);
  const double rmax = std::max(std::hypot(rx, ry), 1e-12);

  std::vector<double> aolp_err, dolp_err;
  std::vector<float> heat(map.pixel_count(), 0.0f);
  double inner = 0.0, outer = 0.0, dolp_max = 0.0;
  std::size_t n_inner = 0, n_outer = 0;
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const std::size_t j = static_cast<std::size_t>(v) * k.width + u;
      if (!usable(map.status[j]) || gt_mask.data[j] == 0) continue;
      const double de = std::abs(safe_dolp(map.stokes[j]) - gt_dolp.data[j]);
      dolp_err.push_back(de);
      dolp_max = std::max(dolp_max, de);
      if (gt_dolp.data[j] < kMinDolp) continue;
      const double e = angle_error(est_aolp[j], gt_aolp.data[j], AngleAmbiguity::Pi);
      aolp_err.push_back(e);
      heat[j] = static_cast<float>(e / kDeg);
      const double r = std::hypot(u - k.cx, v - k.cy) / rmax;
      if (r <= 0.1) inner += e, ++n_inner;
      if (r >= 0.9) outer += e, ++n_outer;
    }
  }
  Json aolp = stats_json(aolp_err);
  aolp["truth"] = aolp_key;
  aolp["radial"] = {{"inner_radius", 0.1},
                    {"outer_radius", 0.9},
                    {"inner_mean_deg", n_inner ? Json(inner / n_inner / kDeg) : Json(nullptr)},
                    {"outer_mean_deg", n_outer ? Json(outer / n_outer / kDeg) : Json(nullptr)},
                    {"inner_count", n_inner},
                    {"outer_count", n_outer}};
  Json dolp{{"count", dolp_err.size()}};
  if (dolp_err.empty()) {
    dolp["mae"] = dolp["rmse"] = dolp["max"] = nullptr;
  } else {
    double sum = 0.0, sq = 0.0;
    for (double e : dolp_err) sum += e, sq += e * e;
    dolp["mae"] = sum / dolp_err.size();
    dolp["rmse"] = std::sqrt(sq / dolp_err.size());
    dolp["max"] = dolp_max;
  }

  Json report{{"frame", frame_name(map.frame)}, {"aolp", aolp}, {"dolp", dolp}};
  for (const char* key : {"mae_deg", "rmse_deg", "std_deg", "count"}) report[key] = aolp[key];

  if (o.normals) {
    const NormalField est = read_normal_field(*o.normals);
    NormalField truth;
    truth.width = k.width;
    truth.height = k.height;
    truth.frame = FrameConvention::Camera;
    const Image gt_normals = load_gt(o.gt, files, "normals", 3, k);
    truth.normals.resize(gt_normals.pixel_count());
    truth.valid.resize(gt_normals.pixel_count());
    for (std::size_t j = 0; j < truth.normals.size(); ++j) {
      truth.normals[j] = {gt_normals.data[3 * j], gt_normals.data[3 * j + 1], gt_normals.data[3 * j + 2]};
      truth.valid[j] = gt_mask.data[j] != 0 && truth.normals[j].norm() > 0.5;
    }
    if (est.width != k.width || est.height != k.height) fail(ErrorKind::SchemaError, "normals: map size differs from the ground truth");
    if (est.frame != FrameConvention::Camera) fail(ErrorKind::FrameMismatch, "normals: expected a camera-frame normal map");
    std::vector<double> errors;
    for (std::size_t j = 0; j < truth.normals.size(); ++j)
      if (est.valid[j] && truth.valid[j]) errors.push_back(normal_error(est.normals[j], truth.normals[j], AngleAmbiguity::None));
    report["normals"] = stats_json(errors);
  }

  ensure_parent(o.report);
  io::write_json(report, o.report);
  if (o.heatmap) {
    ensure_parent(*o.heatmap);
    io::write_pfm(io::FloatMap{k.width, k.height, 1, std::move(heat), false}, *o.heatmap);
  }
  std::printf("aolp_mae_deg=%s dolp_mae=%s", aolp["mae_deg"].dump().c_str(), dolp["mae"].dump().c_str());
  if (report.contains("normals")) std::printf(" normal_mae_deg=%s", report["normals"]["mae_deg"].dump().c_str());
  std::printf("\n");
}

}  // namespace polarproj::cli
