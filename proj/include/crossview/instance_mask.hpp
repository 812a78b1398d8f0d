// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "crossview/image.hpp"

namespace crossview {

/// Per-view binary masks of one controlled instance at image resolution,
/// with its id and requested sRGB color. Masks of distinct instances are
/// disjoint within a view.
struct InstanceMask {
  int id = 0;
  std::array<double, 3> target_color{};
  std::vector<Image> views;  // single-channel, 1.0 inside
};

}  // namespace crossview
