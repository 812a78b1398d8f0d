// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>

#include "crossview/camera.hpp"
#include "crossview/correspondence.hpp"

namespace crossview::testing {

inline Camera make_camera(double yaw_deg, double fx, int image_h, int image_w,
                          double ring = 0.5, double height = 1.5) {
  const double a = yaw_deg * std::numbers::pi / 180.0;
  Camera cam;
  cam.intrinsics = {fx, fx, (image_w - 1) / 2.0, (image_h - 1) / 2.0, 0.0};
  cam.extrinsics.rotation.row(0) = Eigen::Vector3d(std::sin(a), -std::cos(a), 0.0);
  cam.extrinsics.rotation.row(1) = Eigen::Vector3d(0.0, 0.0, -1.0);
  cam.extrinsics.rotation.row(2) = Eigen::Vector3d(std::cos(a), std::sin(a), 0.0);
  const Eigen::Vector3d center(ring * std::cos(a), ring * std::sin(a), height);
  cam.extrinsics.translation = -cam.extrinsics.rotation * center;
  return cam;
}

/// Two cameras sharing one pose: the cross-view map is the identity.
inline CameraRig colocated_pair(int image_h = 64, int image_w = 64) {
  CameraRig rig;
  rig.image_height = image_h;
  rig.image_width = image_w;
  rig.cameras = {make_camera(0.0, 80.0, image_h, image_w, 0.0),
                 make_camera(0.0, 80.0, image_h, image_w, 0.0)};
  return rig;
}

/// Two cameras yawed 180 degrees apart with the given horizontal FOV.
inline CameraRig opposite_pair(double fov_deg = 70.0, int image_h = 64,
                               int image_w = 64) {
  const double fx = (image_w / 2.0) / std::tan(fov_deg / 2.0 * std::numbers::pi / 180.0);
  CameraRig rig;
  rig.image_height = image_h;
  rig.image_width = image_w;
  rig.cameras = {make_camera(0.0, fx, image_h, image_w),
                 make_camera(180.0, fx, image_h, image_w)};
  return rig;
}

/// All-valid identity correspondence map between two views.
inline CorrespondenceMap identity_map(int source_view, int target_view, int h, int w) {
  CorrespondenceMap map;
  map.source_view = source_view;
  map.target_view = target_view;
  map.height = h;
  map.width = w;
  map.latent_homography = Homography{};
  map.latent_inverse = Homography{};
  map.cells.resize(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      map.cells[static_cast<std::size_t>(y) * w + x] =
          {static_cast<double>(x), static_cast<double>(y), x, y, true};
  return map;
}

/// All-invalid map between two views.
inline CorrespondenceMap empty_map(int source_view, int target_view, int h, int w) {
  CorrespondenceMap map;
  map.source_view = source_view;
  map.target_view = target_view;
  map.height = h;
  map.width = w;
  map.cells.assign(static_cast<std::size_t>(h) * w, CorrespondenceEntry{});
  return map;
}

}  // namespace crossview::testing
