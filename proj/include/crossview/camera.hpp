// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace crossview {

// World frame: ego at the origin, x forward, y left, z up; the ground is z = 0.
// Camera frame: x right, y down, z along the optical axis.
// View indices are 1-based in every public contract.

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;

  /// Upper-triangular 3x3 with unit bottom-right entry. Throws if fx or fy <= 0.
  Eigen::Matrix3d matrix() const;
  Eigen::Matrix3d inverse_matrix() const;
};

struct CameraExtrinsics {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // world -> camera
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();   // meters

  /// Throws std::domain_error unless rotation is orthonormal with det +1 (1e-9).
  void validate() const;
  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }
};

struct Camera {
  CameraIntrinsics intrinsics;
  CameraExtrinsics extrinsics;
};

struct CameraRig {
  std::vector<Camera> cameras;
  int image_height = 0;
  int image_width = 0;

  int view_count() const { return static_cast<int>(cameras.size()); }
  /// 1-based accessor; throws std::domain_error when out of range.
  const Camera& camera(int m) const;
  void validate() const;  // M >= 2, shared image size, valid rotations
};

/// Cyclic left neighbor, m_l = mod(m + M - 2, M) + 1.
int left_neighbor(int m, int view_count);
/// Cyclic right neighbor, m_r = mod(m, M) + 1; inverse of left_neighbor.
int right_neighbor(int m, int view_count);

struct Projection {
  Eigen::Vector2d pixel;
  double depth = 0.0;  // camera-frame z, meters
};

/// Pinhole projection of a world point. Throws std::domain_error when the point
/// is at or behind the camera (depth <= 1e-9).
Projection project_point(const Camera& cam, const Eigen::Vector3d& point_world);

/// Inverse of project_point: pixel plus camera-frame depth back to world.
Eigen::Vector3d unproject_pixel(const Camera& cam, const Eigen::Vector2d& pixel, double depth);

/// World ray through a pixel (origin = camera center, unit direction).
struct Ray {
  Eigen::Vector3d origin;
  Eigen::Vector3d direction;
};
Ray pixel_ray(const Camera& cam, const Eigen::Vector2d& pixel);

/// Rotates the whole rig about the ego vertical axis; intrinsics untouched.
CameraRig rotate_rig(const CameraRig& rig, double yaw_deg);

// Line-oriented text serialization, one camera per record:
// index fx fy cx cy skew r11..r33 (row-major) t1 t2 t3 H W.
// Round-trips decimals exactly (values printed with 17 significant digits).
std::string rig_to_text(const CameraRig& rig);
CameraRig rig_from_text(const std::string& text);
void save_rig(const CameraRig& rig, const std::string& path);
CameraRig load_rig(const std::string& path);

}  // namespace crossview
