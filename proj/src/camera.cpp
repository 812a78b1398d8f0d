// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/camera.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace crossview {

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  if (!(fx > 0.0) || !(fy > 0.0))
    throw std::domain_error("intrinsics: focal lengths must be positive");
  Eigen::Matrix3d k;
  k << fx, skew, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Matrix3d CameraIntrinsics::inverse_matrix() const {
  return matrix().inverse();
}

void CameraExtrinsics::validate() const {
  const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
  if (err.norm() >= 1e-9 || std::abs(rotation.determinant() - 1.0) >= 1e-9)
    throw std::domain_error("extrinsics: rotation not orthonormal with det +1");
}

const Camera& CameraRig::camera(int m) const {
  if (m < 1 || m > view_count())
    throw std::domain_error("view index out of range");
  return cameras[static_cast<std::size_t>(m - 1)];
}

void CameraRig::validate() const {
  if (view_count() < 2) throw std::domain_error("rig needs at least two cameras");
  if (image_height <= 0 || image_width <= 0)
    throw std::domain_error("rig image size must be positive");
  for (const auto& cam : cameras) {
    cam.intrinsics.matrix();
    cam.extrinsics.validate();
  }
}

int left_neighbor(int m, int view_count) {
  if (view_count < 2 || m < 1 || m > view_count)
    throw std::domain_error("left_neighbor: view index out of range");
  return (m + view_count - 2) % view_count + 1;
}

int right_neighbor(int m, int view_count) {
  if (view_count < 2 || m < 1 || m > view_count)
    throw std::domain_error("right_neighbor: view index out of range");
  return m % view_count + 1;
}

Projection project_point(const Camera& cam, const Eigen::Vector3d& point_world) {
  const Eigen::Vector3d pc =
      cam.extrinsics.rotation * point_world + cam.extrinsics.translation;
  if (pc.z() <= 1e-9) throw std::domain_error("project_point: point behind camera");
  const Eigen::Vector3d h = cam.intrinsics.matrix() * pc;
  return {{h.x() / h.z(), h.y() / h.z()}, pc.z()};
}

Eigen::Vector3d unproject_pixel(const Camera& cam, const Eigen::Vector2d& pixel,
                                double depth) {
  const Eigen::Vector3d dir =
      cam.intrinsics.inverse_matrix() * Eigen::Vector3d(pixel.x(), pixel.y(), 1.0);
  const Eigen::Vector3d pc = dir * depth;  // dir has unit z by construction
  return cam.extrinsics.rotation.transpose() * (pc - cam.extrinsics.translation);
}

Ray pixel_ray(const Camera& cam, const Eigen::Vector2d& pixel) {
  const Eigen::Vector3d dir_cam =
      cam.intrinsics.inverse_matrix() * Eigen::Vector3d(pixel.x(), pixel.y(), 1.0);
  Eigen::Vector3d dir_world = cam.extrinsics.rotation.transpose() * dir_cam;
  dir_world.normalize();
  return {cam.extrinsics.center(), dir_world};
}

CameraRig rotate_rig(const CameraRig& rig, double yaw_deg) {
  if (!std::isfinite(yaw_deg)) throw std::domain_error("rotate_rig: yaw must be finite");
  const double a = yaw_deg * std::numbers::pi / 180.0;
  Eigen::Matrix3d yaw;
  yaw << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
  CameraRig out = rig;
  for (auto& cam : out.cameras) {
    // Rig points move X -> yaw*X, so the world->camera map composes with yaw^T.
    // t is invariant: t' = -R yaw^T (yaw C) = -R C = t.
    cam.extrinsics.rotation = cam.extrinsics.rotation * yaw.transpose();
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string rig_to_text(const CameraRig& rig) {
  std::ostringstream out;
  out << rig.view_count() << "\n";
  for (int m = 1; m <= rig.view_count(); ++m) {
    const Camera& c = rig.camera(m);
    out << m << " " << fmt(c.intrinsics.fx) << " " << fmt(c.intrinsics.fy) << " "
        << fmt(c.intrinsics.cx) << " " << fmt(c.intrinsics.cy) << " "
        << fmt(c.intrinsics.skew);
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) out << " " << fmt(c.extrinsics.rotation(r, col));
    for (int r = 0; r < 3; ++r) out << " " << fmt(c.extrinsics.translation(r));
    out << " " << rig.image_height << " " << rig.image_width << "\n";
  }
  return out.str();
}

CameraRig rig_from_text(const std::string& text) {
  std::istringstream in(text);
  int count = 0;
  if (!(in >> count) || count < 2) throw std::runtime_error("rig text: bad camera count");
  CameraRig rig;
  rig.cameras.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    int idx = 0, h = 0, w = 0;
    Camera c;
    in >> idx >> c.intrinsics.fx >> c.intrinsics.fy >> c.intrinsics.cx >>
        c.intrinsics.cy >> c.intrinsics.skew;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) in >> c.extrinsics.rotation(r, col);
    for (int r = 0; r < 3; ++r) in >> c.extrinsics.translation(r);
    in >> h >> w;
    if (!in) throw std::runtime_error("rig text: truncated record");
    if (idx < 1 || idx > count) throw std::runtime_error("rig text: bad view index");
    if (i == 0) {
      rig.image_height = h;
      rig.image_width = w;
    } else if (h != rig.image_height || w != rig.image_width) {
      throw std::runtime_error("rig text: cameras disagree on image size");
    }
    rig.cameras[static_cast<std::size_t>(idx - 1)] = c;
  }
  rig.validate();
  return rig;
}

void save_rig(const CameraRig& rig, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << rig_to_text(rig);
}

CameraRig load_rig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return rig_from_text(buf.str());
}

}  // namespace crossview
