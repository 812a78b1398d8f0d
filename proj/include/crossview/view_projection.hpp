// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crossview/camera.hpp"

namespace crossview {

/// Top-down class-label grid, ego at the center cell, label 0 = void.
struct BevSemantics {
  int height = 0;  // cells, rows run front (row 0) to back
  int width = 0;   // cells, cols run left (col 0) to right
  double meters_per_cell = 0.0;
  int class_count = 0;
  std::vector<std::uint8_t> labels;  // row-major

  BevSemantics() = default;
  BevSemantics(int h, int w, double mpc, int classes);

  std::uint8_t at(int r, int c) const {
    return labels[static_cast<std::size_t>(r) * width + c];
  }
  std::uint8_t& at(int r, int c) {
    return labels[static_cast<std::size_t>(r) * width + c];
  }

  /// World (x forward, y left) to cell; false when outside the extent.
  bool world_to_cell(double x, double y, int& row, int& col) const;
  /// Center of a cell in world coordinates.
  void cell_center(int row, int col, double& x, double& y) const;
  double extent_meters() const { return height * meters_per_cell; }
};

struct PerspectiveSemantics {
  int view = 0;  // 1-based
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> labels;

  std::uint8_t at(int y, int x) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int y, int x) {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

/// Ground intersection (z = 0) of the ray through a pixel, in front of the
/// camera; nullopt when the ray does not descend.
std::optional<Eigen::Vector3d> ground_intersection(const Camera& cam,
                                                   const Eigen::Vector2d& pixel);

/// Inverse-warp projection: each perspective pixel casts its ray, takes the
/// nearest BEV cell label where it meets the ground inside the extent, void
/// otherwise. Throws std::domain_error when the camera is at or below ground.
PerspectiveSemantics project_bev_to_view(const BevSemantics& bev, const Camera& cam,
                                         int image_height, int image_width, int view);

std::vector<PerspectiveSemantics> project_all_views(const BevSemantics& bev,
                                                    const CameraRig& rig);

struct BevReconstruction {
  BevSemantics bev;                 // majority label per covered cell
  std::vector<std::uint8_t> coverage;  // 1 where any vote landed
  double covered_fraction() const;
};

/// Votes every non-void pixel's ground cell; majority label per cell (ties go
/// to the smaller label id), uncovered cells flagged.
BevReconstruction unproject_view_to_bev(const PerspectiveSemantics& sem, const Camera& cam,
                                        const BevSemantics& grid_spec);

/// Multi-view fusion: votes pooled across all views before the majority.
BevReconstruction unproject_views_to_bev(const std::vector<PerspectiveSemantics>& views,
                                         const CameraRig& rig,
                                         const BevSemantics& grid_spec);

/// Sidecar header for stored label maps: meters per cell plus class palette.
void save_semantics_meta(const std::string& path, double meters_per_cell,
                         int class_count,
                         const std::vector<std::array<std::uint8_t, 3>>& palette,
                         const std::vector<std::string>& names);

}  // namespace crossview
