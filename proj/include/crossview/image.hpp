// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace crossview {

/// Row-major interleaved image, values in [0,1]. channels is 1 (gray) or 3 (RGB).
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int c, double fill = 0.0);

  std::size_t index(int y, int x, int ch) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + ch;
  }
  double& at(int y, int x, int ch) { return data[index(y, x, ch)]; }
  double at(int y, int x, int ch) const { return data[index(y, x, ch)]; }

  void set_rgb(int y, int x, const std::array<double, 3>& rgb);
  std::array<double, 3> rgb(int y, int x) const;
};

/// 8-bit binary PPM (P6, channels == 3) or PGM (P5, channels == 1), chosen from
/// the image's channel count. Values are clamped and rounded to 0..255.
void save_image(const Image& img, const std::string& path);
Image load_image(const std::string& path);

/// Label grids as raw 8-bit graymaps (one label id per byte, no scaling).
void save_labels_pgm(const std::vector<std::uint8_t>& labels, int height, int width,
                     const std::string& path);
std::vector<std::uint8_t> load_labels_pgm(const std::string& path, int& height, int& width);

std::uint8_t quantize8(double v);

}  // namespace crossview
