// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/view_projection.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace crossview {

BevSemantics::BevSemantics(int h, int w, double mpc, int classes)
    : height(h), width(w), meters_per_cell(mpc), class_count(classes),
      labels(static_cast<std::size_t>(h) * w, 0) {
  if (h <= 0 || w <= 0 || !(mpc > 0.0) || classes <= 0)
    throw std::invalid_argument("BevSemantics: bad shape");
}

bool BevSemantics::world_to_cell(double x, double y, int& row, int& col) const {
  row = static_cast<int>(std::floor(height / 2.0 - x / meters_per_cell));
  col = static_cast<int>(std::floor(width / 2.0 - y / meters_per_cell));
  return row >= 0 && row < height && col >= 0 && col < width;
}

void BevSemantics::cell_center(int row, int col, double& x, double& y) const {
  x = (height / 2.0 - row - 0.5) * meters_per_cell;
  y = (width / 2.0 - col - 0.5) * meters_per_cell;
}

std::optional<Eigen::Vector3d> ground_intersection(const Camera& cam,
                                                   const Eigen::Vector2d& pixel) {
  const Ray ray = pixel_ray(cam, pixel);
  if (ray.direction.z() >= -1e-12) return std::nullopt;
  const double lambda = ray.origin.z() / -ray.direction.z();
  return ray.origin + lambda * ray.direction;
}

PerspectiveSemantics project_bev_to_view(const BevSemantics& bev, const Camera& cam,
                                         int image_height, int image_width, int view) {
  if (cam.extrinsics.center().z() <= 1e-9)
    throw std::domain_error("project_bev_to_view: camera at or below ground");
  PerspectiveSemantics sem;
  sem.view = view;
  sem.height = image_height;
  sem.width = image_width;
  sem.labels.assign(static_cast<std::size_t>(image_height) * image_width, 0);

  // Hoisted ray setup; per-pixel work is just one mat-vec and the plane hit.
  const Eigen::Matrix3d kinv = cam.intrinsics.inverse_matrix();
  const Eigen::Matrix3d rt = cam.extrinsics.rotation.transpose();
  const Eigen::Vector3d origin = cam.extrinsics.center();
  for (int y = 0; y < image_height; ++y) {
    for (int x = 0; x < image_width; ++x) {
      const Eigen::Vector3d dir = rt * (kinv * Eigen::Vector3d(x, y, 1.0));
      if (dir.z() >= -1e-12) continue;
      const double lambda = origin.z() / -dir.z();
      const double gx = origin.x() + lambda * dir.x();
      const double gy = origin.y() + lambda * dir.y();
      int row = 0, col = 0;
      if (bev.world_to_cell(gx, gy, row, col)) sem.at(y, x) = bev.at(row, col);
    }
  }
  return sem;
}

std::vector<PerspectiveSemantics> project_all_views(const BevSemantics& bev,
                                                    const CameraRig& rig) {
  rig.validate();
  std::vector<PerspectiveSemantics> out;
  out.reserve(static_cast<std::size_t>(rig.view_count()));
  for (int m = 1; m <= rig.view_count(); ++m)
    out.push_back(project_bev_to_view(bev, rig.camera(m), rig.image_height,
                                      rig.image_width, m));
  return out;
}

double BevReconstruction::covered_fraction() const {
  if (coverage.empty()) return 0.0;
  std::size_t n = 0;
  for (auto c : coverage) n += c;
  return static_cast<double>(n) / coverage.size();
}

namespace {

struct VoteGrid {
  int height, width, classes;
  std::vector<int> votes;  // (cell, class)

  VoteGrid(int h, int w, int c)
      : height(h), width(w), classes(c),
        votes(static_cast<std::size_t>(h) * w * c, 0) {}

  void add(int r, int c, int label) {
    ++votes[(static_cast<std::size_t>(r) * width + c) * classes + label];
  }

  BevReconstruction finalize(const BevSemantics& spec) const {
    BevReconstruction out;
    out.bev = BevSemantics(height, width, spec.meters_per_cell, spec.class_count);
    out.coverage.assign(static_cast<std::size_t>(height) * width, 0);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const std::size_t base = (static_cast<std::size_t>(r) * width + c) * classes;
        int best = -1, best_count = 0;
        for (int k = 0; k < classes; ++k) {
          const int n = votes[base + k];
          if (n > best_count) {
            best_count = n;
            best = k;
          }
        }
        if (best >= 0) {
          out.bev.at(r, c) = static_cast<std::uint8_t>(best);
          out.coverage[static_cast<std::size_t>(r) * width + c] = 1;
        }
      }
    }
    return out;
  }
};

void accumulate_votes(VoteGrid& grid, const PerspectiveSemantics& sem, const Camera& cam,
                      const BevSemantics& spec) {
  if (cam.extrinsics.center().z() <= 1e-9)
    throw std::domain_error("unproject_view_to_bev: camera at or below ground");
  const Eigen::Matrix3d kinv = cam.intrinsics.inverse_matrix();
  const Eigen::Matrix3d rt = cam.extrinsics.rotation.transpose();
  const Eigen::Vector3d origin = cam.extrinsics.center();
  for (int y = 0; y < sem.height; ++y) {
    for (int x = 0; x < sem.width; ++x) {
      const std::uint8_t label = sem.at(y, x);
      if (label == 0) continue;
      if (label >= spec.class_count)
        throw std::domain_error("unproject_view_to_bev: label beyond class count");
      const Eigen::Vector3d dir = rt * (kinv * Eigen::Vector3d(x, y, 1.0));
      if (dir.z() >= -1e-12) continue;
      const double lambda = origin.z() / -dir.z();
      int row = 0, col = 0;
      if (spec.world_to_cell(origin.x() + lambda * dir.x(),
                             origin.y() + lambda * dir.y(), row, col))
        grid.add(row, col, label);
    }
  }
}

}  // namespace

BevReconstruction unproject_view_to_bev(const PerspectiveSemantics& sem, const Camera& cam,
                                        const BevSemantics& grid_spec) {
  VoteGrid grid(grid_spec.height, grid_spec.width, grid_spec.class_count);
  accumulate_votes(grid, sem, cam, grid_spec);
  return grid.finalize(grid_spec);
}

BevReconstruction unproject_views_to_bev(const std::vector<PerspectiveSemantics>& views,
                                         const CameraRig& rig,
                                         const BevSemantics& grid_spec) {
  VoteGrid grid(grid_spec.height, grid_spec.width, grid_spec.class_count);
  for (const auto& sem : views)
    accumulate_votes(grid, sem, rig.camera(sem.view), grid_spec);
  return grid.finalize(grid_spec);
}

void save_semantics_meta(const std::string& path, double meters_per_cell,
                         int class_count,
                         const std::vector<std::array<std::uint8_t, 3>>& palette,
                         const std::vector<std::string>& names) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "meters_per_cell " << meters_per_cell << "\n";
  out << "classes " << class_count << "\n";
  for (int k = 0; k < class_count; ++k) {
    out << "class " << k << " " << names[static_cast<std::size_t>(k)] << " "
        << int(palette[static_cast<std::size_t>(k)][0]) << " "
        << int(palette[static_cast<std::size_t>(k)][1]) << " "
        << int(palette[static_cast<std::size_t>(k)][2]) << "\n";
  }
}

}  // namespace crossview
