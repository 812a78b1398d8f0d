// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/scene.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "crossview/rng.hpp"

namespace crossview {

const std::vector<std::array<std::uint8_t, 3>>& class_palette() {
  static const std::vector<std::array<std::uint8_t, 3>> palette = {
      {{0, 0, 0}},        // void
      {{90, 90, 96}},     // drivable
      {{200, 30, 30}},    // vehicle
      {{140, 90, 50}},    // building
      {{30, 150, 40}},    // vegetation
  };
  return palette;
}

const std::vector<std::string>& class_names() {
  static const std::vector<std::string> names = {"void", "drivable", "vehicle",
                                                 "building", "vegetation"};
  return names;
}

std::array<double, 3> class_color(int label) {
  const auto& p = class_palette().at(static_cast<std::size_t>(label));
  return {p[0] / 255.0, p[1] / 255.0, p[2] / 255.0};
}

SceneSpec default_scene_spec(std::uint64_t seed) {
  SceneSpec spec;
  spec.seed = seed;
  spec.vehicles = {
      {10.0, -1.75, 4.5, 2.0, {220 / 255.0, 40 / 255.0, 40 / 255.0}},
      {17.0, 1.75, 4.5, 2.0, {240 / 255.0, 240 / 255.0, 240 / 255.0}},
      {-12.0, 1.75, 4.5, 2.0, {40 / 255.0, 70 / 255.0, 220 / 255.0}},
  };
  return spec;
}

SceneSpec load_scene_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  SceneSpec spec;
  spec.vehicles.clear();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "seed") {
      ls >> spec.seed;
    } else if (key == "lane_width") {
      ls >> spec.lane_width;
    } else if (key == "lanes") {
      ls >> spec.lanes;
    } else if (key == "curvature") {
      ls >> spec.curvature;
    } else if (key == "building_band") {
      ls >> spec.building_band;
    } else if (key == "vegetation_band") {
      ls >> spec.vegetation_band;
    } else if (key == "vehicle") {
      VehicleSpec v;
      int r = 0, g = 0, b = 0;
      ls >> v.x >> v.y >> v.length >> v.width >> r >> g >> b;
      v.color = {r / 255.0, g / 255.0, b / 255.0};
      spec.vehicles.push_back(v);
    } else {
      throw std::runtime_error("scene spec: unknown key '" + key + "'");
    }
    if (ls.fail()) throw std::runtime_error("scene spec: bad line '" + line + "'");
  }
  return spec;
}

void save_scene_spec(const SceneSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "seed " << spec.seed << "\n";
  out << "lane_width " << spec.lane_width << "\n";
  out << "lanes " << spec.lanes << "\n";
  out << "curvature " << spec.curvature << "\n";
  out << "building_band " << spec.building_band << "\n";
  out << "vegetation_band " << spec.vegetation_band << "\n";
  for (const auto& v : spec.vehicles) {
    out << "vehicle " << v.x << " " << v.y << " " << v.length << " " << v.width;
    for (double c : v.color) out << " " << int(std::lround(c * 255.0));
    out << "\n";
  }
}

CameraRig make_default_rig() {
  constexpr int kImageH = 256, kImageW = 448;
  constexpr double kRing = 0.5, kHeight = 1.5;
  // 90 degree horizontal FOV: fx = (W/2) / tan(45 deg) = 224 exactly.
  constexpr double kFocal = kImageW / 2.0;
  const double yaws[] = {0.0, -55.0, -110.0, 180.0, 110.0, 55.0};

  CameraRig rig;
  rig.image_height = kImageH;
  rig.image_width = kImageW;
  for (double yaw_deg : yaws) {
    const double a = yaw_deg * std::numbers::pi / 180.0;
    const Eigen::Vector3d forward(std::cos(a), std::sin(a), 0.0);
    const Eigen::Vector3d right(std::sin(a), -std::cos(a), 0.0);
    const Eigen::Vector3d down(0.0, 0.0, -1.0);
    Camera cam;
    cam.intrinsics = {kFocal, kFocal, (kImageW - 1) / 2.0, (kImageH - 1) / 2.0, 0.0};
    cam.extrinsics.rotation.row(0) = right;
    cam.extrinsics.rotation.row(1) = down;
    cam.extrinsics.rotation.row(2) = forward;
    const Eigen::Vector3d center(kRing * std::cos(a), kRing * std::sin(a), kHeight);
    cam.extrinsics.translation = -cam.extrinsics.rotation * center;
    rig.cameras.push_back(cam);
  }
  rig.validate();
  return rig;
}

namespace {

struct Rect {
  double x0, x1, y0, y1;
  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  bool intersects(const Rect& o) const {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
};

Rect footprint(const VehicleSpec& v) {
  return {v.x - v.length / 2.0, v.x + v.length / 2.0, v.y - v.width / 2.0,
          v.y + v.width / 2.0};
}

}  // namespace

SynthScene synth_bev_scene(const SceneSpec& spec) {
  constexpr int kCells = 400;           // 80 m x 80 m at 0.2 m per cell
  constexpr double kMetersPerCell = 0.2;

  const double half_extent = kCells * kMetersPerCell / 2.0;
  std::vector<Rect> rects;
  for (const auto& v : spec.vehicles) {
    const Rect r = footprint(v);
    if (r.x0 < -half_extent || r.x1 > half_extent || r.y0 < -half_extent ||
        r.y1 > half_extent)
      throw std::invalid_argument("scene: vehicle footprint outside BEV extent");
    for (const auto& prev : rects)
      if (r.intersects(prev))
        throw std::invalid_argument("scene: overlapping vehicle footprints");
    rects.push_back(r);
  }

  SynthScene scene;
  scene.bev = BevSemantics(kCells, kCells, kMetersPerCell, kClassCount);
  scene.instance_ids.assign(static_cast<std::size_t>(kCells) * kCells, 0);
  for (std::size_t i = 0; i < spec.vehicles.size(); ++i)
    scene.instances.push_back({static_cast<int>(i) + 1, spec.vehicles[i]});

  const double road_half = spec.lanes * spec.lane_width / 2.0;
  for (int r = 0; r < kCells; ++r) {
    for (int c = 0; c < kCells; ++c) {
      double x = 0.0, y = 0.0;
      scene.bev.cell_center(r, c, x, y);
      const double road_center = spec.curvature * x * x / 2.0;
      const double lateral = std::abs(y - road_center);

      std::uint8_t label = kVoid;
      if (lateral <= road_half) {
        label = kDrivable;
      } else if (lateral <= road_half + spec.building_band) {
        // City blocks: ~10 m slabs along the road, some left open as greenery.
        const auto block = static_cast<std::uint64_t>(std::floor(x / 10.0) + 1000.0);
        const auto side = static_cast<std::uint64_t>(y > road_center ? 1 : 2);
        label = rng::mix(spec.seed, 0xb10cULL, block, side) % 4 != 0 ? kBuilding
                                                                    : kVegetation;
      } else if (lateral <= road_half + spec.building_band + spec.vegetation_band) {
        label = kVegetation;
      }

      for (std::size_t i = 0; i < rects.size(); ++i) {
        if (rects[i].contains(x, y)) {
          label = kVehicle;
          scene.instance_ids[static_cast<std::size_t>(r) * kCells + c] =
              static_cast<std::uint8_t>(i + 1);
          break;
        }
      }
      scene.bev.at(r, c) = label;
    }
  }
  return scene;
}

GtViews render_gt_views(const SynthScene& scene, const CameraRig& rig) {
  rig.validate();
  GtViews out;
  const int hgt = rig.image_height, wid = rig.image_width;
  out.images.assign(static_cast<std::size_t>(rig.view_count()), Image(hgt, wid, 3));
  for (const auto& inst : scene.instances) {
    InstanceMask mask;
    mask.id = inst.id;
    mask.target_color = inst.vehicle.color;
    mask.views.assign(static_cast<std::size_t>(rig.view_count()), Image(hgt, wid, 1));
    out.masks.push_back(std::move(mask));
  }

  for (int m = 1; m <= rig.view_count(); ++m) {
    const Camera& cam = rig.camera(m);
    Image& img = out.images[static_cast<std::size_t>(m - 1)];
    const Eigen::Matrix3d kinv = cam.intrinsics.inverse_matrix();
    const Eigen::Matrix3d rt = cam.extrinsics.rotation.transpose();
    const Eigen::Vector3d origin = cam.extrinsics.center();
    for (int y = 0; y < hgt; ++y) {
      for (int x = 0; x < wid; ++x) {
        const Eigen::Vector3d dir = rt * (kinv * Eigen::Vector3d(x, y, 1.0));
        if (dir.z() >= -1e-12) continue;  // stays void-colored
        const double lambda = origin.z() / -dir.z();
        int row = 0, col = 0;
        if (!scene.bev.world_to_cell(origin.x() + lambda * dir.x(),
                                     origin.y() + lambda * dir.y(), row, col))
          continue;
        const std::uint8_t label = scene.bev.at(row, col);
        const std::uint8_t inst =
            scene.instance_ids[static_cast<std::size_t>(row) * scene.bev.width + col];
        if (inst > 0) {
          img.set_rgb(y, x, scene.instances[static_cast<std::size_t>(inst - 1)].vehicle.color);
          out.masks[static_cast<std::size_t>(inst - 1)]
              .views[static_cast<std::size_t>(m - 1)]
              .at(y, x, 0) = 1.0;
        } else {
          img.set_rgb(y, x, class_color(label));
        }
      }
    }
  }
  return out;
}

}  // namespace crossview
