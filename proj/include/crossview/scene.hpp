// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crossview/camera.hpp"
#include "crossview/instance_mask.hpp"
#include "crossview/view_projection.hpp"

namespace crossview {

// Semantic classes of the synthetic world.
enum SemClass : std::uint8_t {
  kVoid = 0,
  kDrivable = 1,
  kVehicle = 2,
  kBuilding = 3,
  kVegetation = 4,
};
inline constexpr int kClassCount = 5;

const std::vector<std::array<std::uint8_t, 3>>& class_palette();
const std::vector<std::string>& class_names();
std::array<double, 3> class_color(int label);  // palette entry scaled to [0,1]

struct VehicleSpec {
  double x = 0.0;       // footprint center, meters, world frame
  double y = 0.0;
  double length = 4.5;  // along x
  double width = 2.0;   // along y
  std::array<double, 3> color{0.8, 0.1, 0.1};  // sRGB in [0,1]
};

struct SceneSpec {
  std::uint64_t seed = 0;
  double lane_width = 3.5;  // meters
  int lanes = 2;
  double curvature = 0.0;   // 1/m, lateral offset = curvature * x^2 / 2
  double building_band = 8.0;
  double vegetation_band = 16.0;
  std::vector<VehicleSpec> vehicles;
};

SceneSpec default_scene_spec(std::uint64_t seed);

// Declarative text format, one "key value..." per line:
//   seed N | lane_width W | lanes N | curvature C |
//   building_band W | vegetation_band W |
//   vehicle x y length width r g b   (meters; color 0..255)
SceneSpec load_scene_spec(const std::string& path);
void save_scene_spec(const SceneSpec& spec, const std::string& path);

struct Instance {
  int id = 0;  // 1-based
  VehicleSpec vehicle;
};

struct SynthScene {
  BevSemantics bev;
  std::vector<std::uint8_t> instance_ids;  // per BEV cell, 0 = none
  std::vector<Instance> instances;
};

/// Paper-default six-camera rig: clockwise yaws {0, -55, -110, 180, 110, 55}
/// degrees, 90 degree horizontal FOV, cameras on a 0.5 m ring at 1.5 m height,
/// 256 x 448 images.
CameraRig make_default_rig();

/// Deterministic label grid: drivable corridor, background bands (block
/// pattern keyed by the seed), vehicle rectangles. Byte-identical per seed.
/// Throws std::invalid_argument on overlapping vehicle footprints.
SynthScene synth_bev_scene(const SceneSpec& spec);

struct GtViews {
  std::vector<Image> images;          // flat-shaded, one per view
  std::vector<InstanceMask> masks;    // one per instance, all views
};

/// Flat-shaded renders via the same per-pixel ray cast the projection uses;
/// vehicle pixels take their spec color, everything else its class color.
GtViews render_gt_views(const SynthScene& scene, const CameraRig& rig);

}  // namespace crossview
