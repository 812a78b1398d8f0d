// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/correspondence.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "crossview/image.hpp"

namespace crossview {

int CorrespondenceMap::valid_count() const {
  int n = 0;
  for (const auto& e : cells) n += e.valid ? 1 : 0;
  return n;
}

double CorrespondenceMap::overlap_fraction() const {
  return cells.empty() ? 0.0 : static_cast<double>(valid_count()) / cells.size();
}

Homography latent_scale_homography(const Homography& h, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("latent scale factor must be positive");
  Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
  s(0, 0) = s(1, 1) = 1.0 / factor;
  return Homography::from_matrix(s * h.m * s.inverse());
}

namespace {

CorrespondenceMap build_one(const CameraRig& rig, int src_view, int dst_view, int h,
                            int w, double factor) {
  const Camera& src = rig.camera(src_view);
  const Camera& dst = rig.camera(dst_view);
  CorrespondenceMap map;
  map.source_view = src_view;
  map.target_view = dst_view;
  map.height = h;
  map.width = w;
  map.cells.resize(static_cast<std::size_t>(h) * w);
  map.latent_homography = latent_scale_homography(ground_homography(src, dst), factor);
  map.latent_inverse = invert_homography(map.latent_homography);

  // Validity needs the physically oriented matrix; the normalized Homography
  // may carry a flipped global sign.
  Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
  s(0, 0) = s(1, 1) = 1.0 / factor;
  const Eigen::Matrix3d hm = s * ground_matrix(src, dst) * s.inverse();
  const Eigen::Matrix3d hb = hm.inverse();

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      CorrespondenceEntry e;
      const Eigen::Vector3d q = hm * Eigen::Vector3d(x, y, 1.0);
      if (q.z() > 1e-12) {
        const double tx = q.x() / q.z(), ty = q.y() / q.z();
        const int ix = static_cast<int>(std::llround(tx));
        const int iy = static_cast<int>(std::llround(ty));
        if (ix >= 0 && ix < w && iy >= 0 && iy < h) {
          const Eigen::Vector3d b = hb * Eigen::Vector3d(ix, iy, 1.0);
          if (std::abs(b.z()) > 1e-12) {
            const double rx = b.x() / b.z() - x, ry = b.y() / b.z() - y;
            if (std::hypot(rx, ry) <= CorrespondenceMap::kCycleTolerance)
              e = {tx, ty, ix, iy, true};
          }
        }
      }
      map.cells[static_cast<std::size_t>(y) * w + x] = e;
    }
  }
  return map;
}

}  // namespace

ViewPairMaps build_correspondence_map(const CameraRig& rig, int m, int h, int w,
                                      double factor) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("correspondence grid must be positive");
  rig.validate();
  const int mr = right_neighbor(m, rig.view_count());
  const int ml = left_neighbor(m, rig.view_count());
  return {build_one(rig, m, mr, h, w, factor), build_one(rig, m, ml, h, w, factor)};
}

std::vector<ViewPairMaps> build_all_maps(const CameraRig& rig, int h, int w, double factor) {
  std::vector<ViewPairMaps> maps;
  maps.reserve(static_cast<std::size_t>(rig.view_count()));
  for (int m = 1; m <= rig.view_count(); ++m)
    maps.push_back(build_correspondence_map(rig, m, h, w, factor));
  return maps;
}

std::vector<GridIndex> neighborhood(const CorrespondenceMap& map, GridIndex p, int window) {
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("neighborhood: window must be odd and >= 1");
  if (p.y < 0 || p.y >= map.height || p.x < 0 || p.x >= map.width)
    throw std::domain_error("neighborhood: index outside grid");
  const CorrespondenceEntry& e = map.at(p.y, p.x);
  if (!e.valid) throw std::domain_error("neighborhood: no correspondence at this cell");
  std::vector<GridIndex> out;
  out.reserve(static_cast<std::size_t>(window) * window);
  const int r = window / 2;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int y = e.iy + dy, x = e.ix + dx;
      if (y >= 0 && y < map.height && x >= 0 && x < map.width) out.push_back({y, x});
    }
  }
  return out;
}

void save_overlap_mask(const CorrespondenceMap& map, const std::string& path) {
  std::vector<std::uint8_t> mask(map.cells.size());
  for (std::size_t i = 0; i < map.cells.size(); ++i)
    mask[i] = map.cells[i].valid ? 255 : 0;
  save_labels_pgm(mask, map.height, map.width, path);
}

void save_coordinate_table(const CorrespondenceMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out.write("CORRMAP1", 8);
  const std::int32_t dims[2] = {map.height, map.width};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  for (const auto& e : map.cells) {
    const double xy[2] = {e.tx, e.ty};
    const std::uint8_t v = e.valid ? 1 : 0;
    out.write(reinterpret_cast<const char*>(xy), sizeof xy);
    out.write(reinterpret_cast<const char*>(&v), 1);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

CorrespondenceMap load_coordinate_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "CORRMAP1", 8) != 0)
    throw std::runtime_error("bad coordinate table magic: " + path);
  std::int32_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  CorrespondenceMap map;
  map.height = dims[0];
  map.width = dims[1];
  map.cells.resize(static_cast<std::size_t>(map.height) * map.width);
  for (auto& e : map.cells) {
    double xy[2];
    std::uint8_t v = 0;
    in.read(reinterpret_cast<char*>(xy), sizeof xy);
    in.read(reinterpret_cast<char*>(&v), 1);
    e.tx = xy[0];
    e.ty = xy[1];
    e.valid = v != 0;
    e.ix = static_cast<int>(std::llround(e.tx));
    e.iy = static_cast<int>(std::llround(e.ty));
  }
  if (!in) throw std::runtime_error("truncated coordinate table: " + path);
  return map;
}

}  // namespace crossview
