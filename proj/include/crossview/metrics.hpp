// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "crossview/camera.hpp"
#include "crossview/image.hpp"
#include "crossview/instance_mask.hpp"
#include "crossview/view_projection.hpp"

namespace crossview {

inline constexpr double kPsnrCap = 99.0;  // dB, applied when MSE underflows

struct PairPsnr {
  int view = 0;      // warp target
  int neighbor = 0;  // warped source
  double psnr = 0.0; // dB
  int overlap_pixels = 0;
  bool valid = false;  // false when the overlap is empty (pair skipped)
};

struct OverlapPsnrReport {
  std::vector<PairPsnr> pairs;
  double mean = 0.0;  // over valid pairs
};

/// Cross-view visual consistency: for every view m the right neighbor's image
/// is warped into m through the pair's ground homography (bilinear sampling)
/// and PSNR is taken over the valid overlap (peak 1.0, capped at 99 dB).
OverlapPsnrReport overlap_psnr(const std::vector<Image>& images, const CameraRig& rig);

/// Per-view PSNR between two images of equal shape (fidelity metric).
double image_psnr(const Image& a, const Image& b);

struct IouReport {
  std::vector<double> per_class;   // NaN-free; absent classes carry 0 and present=false
  std::vector<bool> present;       // class appears in pred or gt
  double mean = 0.0;               // over present classes
};

IouReport semantic_iou(const std::vector<std::uint8_t>& pred,
                       const std::vector<std::uint8_t>& gt, int class_count);

/// BEV-side semantic consistency: predicted perspective labels are unprojected
/// and fused by majority, then IoU against the ground-truth BEV restricted to
/// covered cells. Classes absent from both sides on the covered set are
/// excluded from the mean; undefined when nothing is covered.
struct BevIouResult {
  IouReport iou;
  double covered_fraction = 0.0;
  bool defined = false;
};
BevIouResult bev_iou(const std::vector<PerspectiveSemantics>& pred_views,
                     const CameraRig& rig, const BevSemantics& gt_bev);

/// CIE76 color difference: sRGB (2.4-gamma piecewise) -> XYZ (D65) -> L*a*b*,
/// Euclidean distance. Components must lie in [0,1] (std::domain_error).
double delta_e_cie76(const std::array<double, 3>& rgb_a, const std::array<double, 3>& rgb_b);

struct InstanceColorEntry {
  int id = 0;
  double delta_e = 0.0;
  bool valid = false;  // false when the mask was empty in every view
};

struct InstanceColorReport {
  std::vector<InstanceColorEntry> instances;
  double mean = 0.0;
  double stddev = 0.0;  // population, over valid instances
};

/// Mean sRGB over each instance's masked pixels (all views pooled) against its
/// target color.
InstanceColorReport instance_color_report(const std::vector<Image>& images,
                                          const std::vector<InstanceMask>& masks);

/// Nearest-color labeling against the class palette plus per-instance vehicle
/// colors; exact on flat-shaded renders.
PerspectiveSemantics classify_by_palette(
    const Image& image, int view,
    const std::vector<std::pair<std::array<double, 3>, std::uint8_t>>& palette);

/// Key-value metric lines, one per line "key value"; stable key order.
struct MetricsReport {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, double value);
  void add_text(const std::string& key, const std::string& value);
  std::string to_text() const;
  std::string to_json() const;  // flat object, same keys
};

}  // namespace crossview
