// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "crossview/camera.hpp"

namespace crossview {

/// 3x3 projective map between image planes. Stored normalized: bottom-right
/// entry fixed to 1 when |h33| > 1e-9, otherwise unit Frobenius norm with a
/// positive first nonzero entry.
struct Homography {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  /// Normalizes and checks rank (|det| > 1e-12); throws std::domain_error.
  static Homography from_matrix(const Eigen::Matrix3d& raw);
};

using CorrespondenceSet =
    std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>;  // (p, p_hat)

/// Ground plane of the world (z = 0) expressed in the camera frame, as the
/// unit up-normal n and the camera height d > 0 above the plane (the plane is
/// {X : n.X + d = 0}). Throws std::domain_error when the camera center is at
/// or below the ground.
std::pair<Eigen::Vector3d, double> ground_plane_in_camera(const Camera& cam);

/// Plane-induced homography H = K_dst (R_rel - t_rel n^T / d) K_src^-1 for the
/// plane {X : n.X + d = 0} in the source camera frame (n unit, pointing from
/// the plane toward the camera center; d > 0 its distance). Exact for points
/// on the plane. Throws std::domain_error for d <= 0.
Homography plane_induced_homography(const Camera& cam_src, const Camera& cam_dst,
                                    const Eigen::Vector3d& plane_normal,
                                    double plane_distance);

/// Same matrix without normalization. Keeps the physical orientation: the sign
/// of (H [p;1]).z() is sign(source ray's plane parameter) * sign(target
/// depth), which overlap tests rely on.
Eigen::Matrix3d plane_induced_matrix(const Camera& cam_src, const Camera& cam_dst,
                                     const Eigen::Vector3d& plane_normal,
                                     double plane_distance);

/// Unnormalized ground-plane matrix between two rig cameras.
Eigen::Matrix3d ground_matrix(const Camera& cam_src, const Camera& cam_dst);

/// Rotation-only limit H = K_dst R_rel K_src^-1, exact for points at infinity.
Homography infinite_homography(const Camera& cam_src, const Camera& cam_dst);

/// Ground-plane homography between two rig cameras (world z = 0).
Homography ground_homography(const Camera& cam_src, const Camera& cam_dst);

/// Normalized (Hartley) direct linear transform. Needs >= 4 pairs
/// (std::invalid_argument otherwise); throws std::domain_error on a
/// rank-deficient system.
Homography estimate_homography_dlt(const CorrespondenceSet& corr);

/// Perspective division of H [p;1]; throws std::domain_error when the result
/// is at infinity (|w| < 1e-12).
Eigen::Vector2d apply_homography(const Homography& h, const Eigen::Vector2d& p);

Homography invert_homography(const Homography& h);

/// Nine decimals, row-major, one line.
std::string homography_to_line(const Homography& h);
Homography homography_from_line(const std::string& line);

}  // namespace crossview
