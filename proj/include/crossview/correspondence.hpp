// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "crossview/camera.hpp"
#include "crossview/homography.hpp"

namespace crossview {

struct GridIndex {
  int y = 0;
  int x = 0;
  bool operator==(const GridIndex&) const = default;
};

struct CorrespondenceEntry {
  double tx = 0.0;  // continuous target coords, grid units
  double ty = 0.0;
  int ix = -1;      // rounded target index (half away from zero)
  int iy = -1;
  bool valid = false;
};

/// Per-cell map from one view's latent grid into a neighbor view's grid via
/// the pair's ground homography at latent scale.
///
/// A cell is valid when its correspondence is usable at grid resolution: the
/// mapped point lands inside the target grid with positive homogeneous depth
/// (w > 0 rejects mappings through the plane's backside, e.g. between
/// opposite-facing cameras), and mapping the rounded target back through the
/// inverse homography returns to within kCycleTolerance cells of the source,
/// so rounding cannot silently pair unrelated cells.
struct CorrespondenceMap {
  int source_view = 0;  // 1-based
  int target_view = 0;
  int height = 0;
  int width = 0;
  std::vector<CorrespondenceEntry> cells;  // row-major
  Homography latent_homography;            // source grid -> target grid
  Homography latent_inverse;               // target grid -> source grid

  static constexpr double kCycleTolerance = 0.75;  // grid cells

  const CorrespondenceEntry& at(int y, int x) const {
    return cells[static_cast<std::size_t>(y) * width + x];
  }
  int valid_count() const;
  double overlap_fraction() const;
};

struct ViewPairMaps {
  CorrespondenceMap to_right;
  CorrespondenceMap to_left;
};

/// Conjugates H by the grid downscale: H_lat = S H S^-1, S = diag(1/f, 1/f, 1).
Homography latent_scale_homography(const Homography& h, double factor);

/// Maps of view m into its right and left neighbors on an h x w grid whose
/// cells subsample the image by `factor`.
ViewPairMaps build_correspondence_map(const CameraRig& rig, int m, int h, int w,
                                      double factor = 8.0);

/// Pair maps for every view, index m-1 for view m.
std::vector<ViewPairMaps> build_all_maps(const CameraRig& rig, int h, int w,
                                         double factor = 8.0);

/// The K x K integer window centered on the rounded target of p, clipped to
/// the grid. K must be odd and >= 1; throws std::domain_error when the map is
/// not valid at p.
std::vector<GridIndex> neighborhood(const CorrespondenceMap& map, GridIndex p, int window);

/// Validity mask as an 8-bit graymap (255 = valid).
void save_overlap_mask(const CorrespondenceMap& map, const std::string& path);

/// Binary coordinate table: "CORRMAP1" magic, int32 h, w, then per cell
/// float64 tx, ty and uint8 valid (little-endian), row-major.
void save_coordinate_table(const CorrespondenceMap& map, const std::string& path);
CorrespondenceMap load_coordinate_table(const std::string& path);

}  // namespace crossview
