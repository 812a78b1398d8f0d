// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "crossview/homography.hpp"

namespace crossview {

namespace {

double psnr_from_mse(double mse) {
  if (mse <= 1e-20) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

std::array<double, 3> bilinear(const Image& img, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int ch = 0; ch < img.channels; ++ch) {
    auto sample = [&](int yy, int xx) {
      yy = std::min(std::max(yy, 0), img.height - 1);
      xx = std::min(std::max(xx, 0), img.width - 1);
      return img.at(yy, xx, ch);
    };
    out[static_cast<std::size_t>(ch)] =
        (1 - fy) * ((1 - fx) * sample(y0, x0) + fx * sample(y0, x0 + 1)) +
        fy * ((1 - fx) * sample(y0 + 1, x0) + fx * sample(y0 + 1, x0 + 1));
  }
  return out;
}

}  // namespace

double image_psnr(const Image& a, const Image& b) {
  if (a.height != b.height || a.width != b.width || a.channels != b.channels)
    throw std::invalid_argument("image_psnr: shape mismatch");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    mse += d * d;
  }
  return psnr_from_mse(mse / static_cast<double>(a.data.size()));
}

OverlapPsnrReport overlap_psnr(const std::vector<Image>& images, const CameraRig& rig) {
  rig.validate();
  if (static_cast<int>(images.size()) != rig.view_count())
    throw std::invalid_argument("overlap_psnr: one image per view required");
  for (const auto& img : images)
    if (img.height != rig.image_height || img.width != rig.image_width)
      throw std::invalid_argument("overlap_psnr: image does not match rig size");

  OverlapPsnrReport report;
  double sum = 0.0;
  int valid_pairs = 0;
  for (int m = 1; m <= rig.view_count(); ++m) {
    const int mr = right_neighbor(m, rig.view_count());
    // Physical orientation needed for the w > 0 overlap test.
    const Eigen::Matrix3d h = ground_matrix(rig.camera(m), rig.camera(mr));

    const Image& base = images[static_cast<std::size_t>(m - 1)];
    const Image& neighbor = images[static_cast<std::size_t>(mr - 1)];
    double mse = 0.0;
    int count = 0;
    for (int y = 0; y < base.height; ++y) {
      for (int x = 0; x < base.width; ++x) {
        // Overlap at image resolution: in-bounds target with positive
        // homogeneous depth, matching the correspondence validity notion.
        const Eigen::Vector3d q = h * Eigen::Vector3d(x, y, 1.0);
        if (q.z() <= 1e-12) continue;
        const double tx = q.x() / q.z(), ty = q.y() / q.z();
        if (tx < 0.0 || tx > neighbor.width - 1.0 || ty < 0.0 || ty > neighbor.height - 1.0)
          continue;
        const auto warped = bilinear(neighbor, tx, ty);
        for (int ch = 0; ch < base.channels; ++ch) {
          const double d = base.at(y, x, ch) - warped[static_cast<std::size_t>(ch)];
          mse += d * d;
        }
        ++count;
      }
    }
    PairPsnr pair;
    pair.view = m;
    pair.neighbor = mr;
    pair.overlap_pixels = count;
    if (count > 0) {
      pair.valid = true;
      pair.psnr = psnr_from_mse(mse / (static_cast<double>(count) * base.channels));
      sum += pair.psnr;
      ++valid_pairs;
    }
    report.pairs.push_back(pair);
  }
  report.mean = valid_pairs > 0 ? sum / valid_pairs : 0.0;
  return report;
}

IouReport semantic_iou(const std::vector<std::uint8_t>& pred,
                       const std::vector<std::uint8_t>& gt, int class_count) {
  if (pred.size() != gt.size())
    throw std::invalid_argument("semantic_iou: shape mismatch");
  std::vector<std::size_t> inter(static_cast<std::size_t>(class_count), 0);
  std::vector<std::size_t> uni(static_cast<std::size_t>(class_count), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::uint8_t p = pred[i], g = gt[i];
    if (p >= class_count || g >= class_count)
      throw std::invalid_argument("semantic_iou: label beyond class count");
    if (p == g) {
      ++inter[p];
      ++uni[p];
    } else {
      ++uni[p];
      ++uni[g];
    }
  }
  IouReport report;
  report.per_class.assign(static_cast<std::size_t>(class_count), 0.0);
  report.present.assign(static_cast<std::size_t>(class_count), false);
  double sum = 0.0;
  int present = 0;
  for (int k = 0; k < class_count; ++k) {
    if (uni[static_cast<std::size_t>(k)] == 0) continue;  // absent from both
    report.present[static_cast<std::size_t>(k)] = true;
    report.per_class[static_cast<std::size_t>(k)] =
        static_cast<double>(inter[static_cast<std::size_t>(k)]) /
        static_cast<double>(uni[static_cast<std::size_t>(k)]);
    sum += report.per_class[static_cast<std::size_t>(k)];
    ++present;
  }
  report.mean = present > 0 ? sum / present : 0.0;
  return report;
}

BevIouResult bev_iou(const std::vector<PerspectiveSemantics>& pred_views,
                     const CameraRig& rig, const BevSemantics& gt_bev) {
  BevIouResult result;
  const BevReconstruction recon = unproject_views_to_bev(pred_views, rig, gt_bev);
  result.covered_fraction = recon.covered_fraction();
  std::vector<std::uint8_t> pred, gt;
  for (std::size_t i = 0; i < recon.coverage.size(); ++i) {
    if (!recon.coverage[i]) continue;
    pred.push_back(recon.bev.labels[i]);
    gt.push_back(gt_bev.labels[i]);
  }
  if (pred.empty()) return result;  // undefined, flagged via defined=false
  result.iou = semantic_iou(pred, gt, gt_bev.class_count);
  result.defined = true;
  return result;
}

namespace {

double srgb_to_linear(double u) {
  return u <= 0.04045 ? u / 12.92 : std::pow((u + 0.055) / 1.055, 2.4);
}

// sRGB D65 matrix; the reference white is the image of RGB(1,1,1) so neutral
// colors map to a* = b* = 0 and white to L* = 100 exactly.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

std::array<double, 3> rgb_to_lab(const std::array<double, 3>& rgb) {
  std::array<double, 3> lin{};
  for (int i = 0; i < 3; ++i) {
    if (rgb[static_cast<std::size_t>(i)] < 0.0 || rgb[static_cast<std::size_t>(i)] > 1.0)
      throw std::domain_error("delta_e: sRGB components must lie in [0,1]");
    lin[static_cast<std::size_t>(i)] = srgb_to_linear(rgb[static_cast<std::size_t>(i)]);
  }
  std::array<double, 3> xyz{}, white{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      xyz[static_cast<std::size_t>(r)] += kRgbToXyz[r][c] * lin[static_cast<std::size_t>(c)];
      white[static_cast<std::size_t>(r)] += kRgbToXyz[r][c];
    }
  }
  constexpr double kDelta = 6.0 / 29.0;
  auto f = [](double t) {
    return t > kDelta * kDelta * kDelta
               ? std::cbrt(t)
               : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
  };
  const double fx = f(xyz[0] / white[0]);
  const double fy = f(xyz[1] / white[1]);
  const double fz = f(xyz[2] / white[2]);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

}  // namespace

double delta_e_cie76(const std::array<double, 3>& rgb_a, const std::array<double, 3>& rgb_b) {
  const auto la = rgb_to_lab(rgb_a);
  const auto lb = rgb_to_lab(rgb_b);
  return std::sqrt((la[0] - lb[0]) * (la[0] - lb[0]) +
                   (la[1] - lb[1]) * (la[1] - lb[1]) +
                   (la[2] - lb[2]) * (la[2] - lb[2]));
}

InstanceColorReport instance_color_report(const std::vector<Image>& images,
                                          const std::vector<InstanceMask>& masks) {
  InstanceColorReport report;
  double sum = 0.0, sum_sq = 0.0;
  int valid = 0;
  for (const auto& mask : masks) {
    if (mask.views.size() != images.size())
      throw std::invalid_argument("instance_color_report: mask views mismatch");
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    std::size_t count = 0;
    for (std::size_t m = 0; m < images.size(); ++m) {
      const Image& img = images[m];
      const Image& mv = mask.views[m];
      if (img.channels != 3)
        throw std::invalid_argument("instance_color_report: RGB images required");
      if (mv.height != img.height || mv.width != img.width)
        throw std::invalid_argument("instance_color_report: mask resolution mismatch");
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
          if (mv.at(y, x, 0) > 0.5) {
            const auto rgb = img.rgb(y, x);
            for (int ch = 0; ch < 3; ++ch) mean[static_cast<std::size_t>(ch)] += rgb[static_cast<std::size_t>(ch)];
            ++count;
          }
    }
    InstanceColorEntry entry;
    entry.id = mask.id;
    if (count > 0) {
      for (double& v : mean) v = std::min(std::max(v / static_cast<double>(count), 0.0), 1.0);
      entry.delta_e = delta_e_cie76(mean, mask.target_color);
      entry.valid = true;
      sum += entry.delta_e;
      sum_sq += entry.delta_e * entry.delta_e;
      ++valid;
    }
    report.instances.push_back(entry);
  }
  if (valid > 0) {
    report.mean = sum / valid;
    const double var = std::max(0.0, sum_sq / valid - report.mean * report.mean);
    report.stddev = std::sqrt(var);
  }
  return report;
}

PerspectiveSemantics classify_by_palette(
    const Image& image, int view,
    const std::vector<std::pair<std::array<double, 3>, std::uint8_t>>& palette) {
  if (image.channels != 3) throw std::invalid_argument("classify_by_palette: RGB input");
  PerspectiveSemantics sem;
  sem.view = view;
  sem.height = image.height;
  sem.width = image.width;
  sem.labels.assign(static_cast<std::size_t>(image.height) * image.width, 0);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const auto rgb = image.rgb(y, x);
      double best = 1e30;
      std::uint8_t label = 0;
      for (const auto& [color, cls] : palette) {
        double d = 0.0;
        for (int ch = 0; ch < 3; ++ch) {
          const double diff = rgb[static_cast<std::size_t>(ch)] - color[static_cast<std::size_t>(ch)];
          d += diff * diff;
        }
        if (d < best) {
          best = d;
          label = cls;
        }
      }
      sem.at(y, x) = label;
    }
  }
  return sem;
}

void MetricsReport::add(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  entries.emplace_back(key, buf);
}

void MetricsReport::add_text(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries) out << k << " " << v << "\n";
  return out.str();
}

std::string MetricsReport::to_json() const {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [k, v] : entries) {
    out << (first ? "" : ",") << "\n  \"" << k << "\": ";
    // numeric when it parses, quoted otherwise
    char* end = nullptr;
    std::strtod(v.c_str(), &end);
    if (end && *end == '\0' && !v.empty())
      out << v;
    else
      out << '"' << v << '"';
    first = false;
  }
  out << "\n}\n";
  return out.str();
}

}  // namespace crossview
