// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace crossview {

/// Dense row-major (height, width, channels) tensor of doubles.
struct Tensor3 {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int h, int w, int c, double fill = 0.0)
      : height(h), width(w), channels(c),
        data(static_cast<std::size_t>(h) * w * c, fill) {
    if (h <= 0 || w <= 0 || c <= 0) throw std::invalid_argument("Tensor3: non-positive shape");
  }

  std::size_t index(int y, int x, int ch) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + ch;
  }
  double& at(int y, int x, int ch) { return data[index(y, x, ch)]; }
  double at(int y, int x, int ch) const { return data[index(y, x, ch)]; }

  bool same_shape(const Tensor3& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
  std::size_t size() const { return data.size(); }
};

}  // namespace crossview
