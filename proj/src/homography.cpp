// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/homography.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace crossview {

Homography Homography::from_matrix(const Eigen::Matrix3d& raw) {
  if (!raw.allFinite() || raw.norm() <= 1e-12)
    throw std::domain_error("homography: zero or non-finite matrix");
  Eigen::Matrix3d m = raw;
  if (std::abs(m(2, 2)) > 1e-9) {
    m /= m(2, 2);
  } else {
    m /= m.norm();
    for (int i = 0; i < 9; ++i) {
      const double v = m(i / 3, i % 3);
      if (v != 0.0) {
        if (v < 0.0) m = -m;
        break;
      }
    }
  }
  if (std::abs(m.determinant()) <= 1e-12)
    throw std::domain_error("homography: rank deficient after normalization");
  return Homography{m};
}

std::pair<Eigen::Vector3d, double> ground_plane_in_camera(const Camera& cam) {
  const double height = cam.extrinsics.center().z();
  if (height <= 1e-9)
    throw std::domain_error("camera center is at or below the ground plane");
  const Eigen::Vector3d n = cam.extrinsics.rotation * Eigen::Vector3d(0.0, 0.0, 1.0);
  return {n, height};
}

Eigen::Matrix3d plane_induced_matrix(const Camera& cam_src, const Camera& cam_dst,
                                     const Eigen::Vector3d& plane_normal,
                                     double plane_distance) {
  if (!(plane_distance > 0.0))
    throw std::domain_error("plane_induced_homography: camera lies on the plane");
  const Eigen::Matrix3d r_rel =
      cam_dst.extrinsics.rotation * cam_src.extrinsics.rotation.transpose();
  const Eigen::Vector3d t_rel =
      cam_dst.extrinsics.translation - r_rel * cam_src.extrinsics.translation;
  const Eigen::Matrix3d core =
      r_rel - (t_rel * plane_normal.transpose()) / plane_distance;
  return cam_dst.intrinsics.matrix() * core * cam_src.intrinsics.inverse_matrix();
}

Eigen::Matrix3d ground_matrix(const Camera& cam_src, const Camera& cam_dst) {
  const auto [n, d] = ground_plane_in_camera(cam_src);
  return plane_induced_matrix(cam_src, cam_dst, n, d);
}

Homography plane_induced_homography(const Camera& cam_src, const Camera& cam_dst,
                                    const Eigen::Vector3d& plane_normal,
                                    double plane_distance) {
  return Homography::from_matrix(
      plane_induced_matrix(cam_src, cam_dst, plane_normal, plane_distance));
}

Homography infinite_homography(const Camera& cam_src, const Camera& cam_dst) {
  const Eigen::Matrix3d r_rel =
      cam_dst.extrinsics.rotation * cam_src.extrinsics.rotation.transpose();
  return Homography::from_matrix(cam_dst.intrinsics.matrix() * r_rel *
                                 cam_src.intrinsics.inverse_matrix());
}

Homography ground_homography(const Camera& cam_src, const Camera& cam_dst) {
  const auto [n, d] = ground_plane_in_camera(cam_src);
  return plane_induced_homography(cam_src, cam_dst, n, d);
}

namespace {

// Similarity normalization: centroid to origin, mean distance sqrt(2).
Eigen::Matrix3d hartley_transform(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(pts.size());
  const double s = mean_dist > 1e-15 ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d t;
  t << s, 0.0, -s * centroid.x(), 0.0, s, -s * centroid.y(), 0.0, 0.0, 1.0;
  return t;
}

}  // namespace

Homography estimate_homography_dlt(const CorrespondenceSet& corr) {
  if (corr.size() < 4)
    throw std::invalid_argument("estimate_homography_dlt: needs at least 4 pairs");
  std::vector<Eigen::Vector2d> src, dst;
  src.reserve(corr.size());
  dst.reserve(corr.size());
  for (const auto& [p, q] : corr) {
    if (!p.allFinite() || !q.allFinite())
      throw std::invalid_argument("estimate_homography_dlt: non-finite point");
    src.push_back(p);
    dst.push_back(q);
  }
  const Eigen::Matrix3d ts = hartley_transform(src);
  const Eigen::Matrix3d td = hartley_transform(dst);

  const auto n = static_cast<Eigen::Index>(corr.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d p = ts * src[static_cast<std::size_t>(i)].homogeneous();
    const Eigen::Vector3d q = td * dst[static_cast<std::size_t>(i)].homogeneous();
    const double u = p.x() / p.z(), v = p.y() / p.z();
    const double x = q.x() / q.z(), y = q.y() / q.z();
    a.row(2 * i) << u, v, 1.0, 0.0, 0.0, 0.0, -u * x, -v * x, -x;
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, u, v, 1.0, -u * y, -v * y, -y;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Solution must be unique: the second-smallest singular value has to be
  // clearly nonzero relative to the largest.
  if (sv(0) <= 0.0 || sv(7) / sv(0) < 1e-10)
    throw std::domain_error("estimate_homography_dlt: degenerate configuration");
  const Eigen::VectorXd hvec = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7), hvec(8);
  return Homography::from_matrix(td.inverse() * hn * ts);
}

Eigen::Vector2d apply_homography(const Homography& h, const Eigen::Vector2d& p) {
  const Eigen::Vector3d q = h.m * p.homogeneous();
  if (std::abs(q.z()) < 1e-12)
    throw std::domain_error("apply_homography: point maps to infinity");
  return {q.x() / q.z(), q.y() / q.z()};
}

Homography invert_homography(const Homography& h) {
  if (std::abs(h.m.determinant()) <= 1e-12)
    throw std::domain_error("invert_homography: near-singular");
  return Homography::from_matrix(h.m.inverse());
}

std::string homography_to_line(const Homography& h) {
  std::ostringstream out;
  char buf[64];
  for (int i = 0; i < 9; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", h.m(i / 3, i % 3));
    out << (i ? " " : "") << buf;
  }
  return out.str();
}

Homography homography_from_line(const std::string& line) {
  std::istringstream in(line);
  Eigen::Matrix3d m;
  for (int i = 0; i < 9; ++i)
    if (!(in >> m(i / 3, i % 3)))
      throw std::runtime_error("homography line: expected 9 values");
  return Homography::from_matrix(m);
}

}  // namespace crossview
