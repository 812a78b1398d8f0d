// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/image.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crossview {

Image::Image(int h, int w, int c, double fill)
    : height(h), width(w), channels(c),
      data(static_cast<std::size_t>(h) * w * c, fill) {
  if (h <= 0 || w <= 0 || (c != 1 && c != 3))
    throw std::invalid_argument("Image: bad shape");
}

void Image::set_rgb(int y, int x, const std::array<double, 3>& rgb) {
  for (int ch = 0; ch < 3; ++ch) at(y, x, ch) = rgb[ch];
}

std::array<double, 3> Image::rgb(int y, int x) const {
  return {at(y, x, 0), at(y, x, 1), at(y, x, 2)};
}

std::uint8_t quantize8(double v) {
  const double s = std::lround(std::fmin(std::fmax(v, 0.0), 1.0) * 255.0);
  return static_cast<std::uint8_t>(s);
}

namespace {

void write_pnm(const std::string& path, const char* magic, int h, int w,
               const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << magic << "\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Reads the PNM header (magic, dims, maxval) skipping whitespace and comments.
void read_pnm_header(std::ifstream& in, const std::string& path, std::string& magic,
                     int& w, int& h) {
  auto next_token = [&]() -> std::string {
    std::string tok;
    while (in) {
      int c = in.get();
      if (c == '#') {
        while (in && in.get() != '\n') {}
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      if (c == EOF) break;
      tok.push_back(static_cast<char>(c));
    }
    return tok;
  };
  magic = next_token();
  const std::string ws = next_token(), hs = next_token(), maxs = next_token();
  if (ws.empty() || hs.empty() || maxs.empty())
    throw std::runtime_error("truncated PNM header: " + path);
  w = std::stoi(ws);
  h = std::stoi(hs);
  if (std::stoi(maxs) != 255) throw std::runtime_error("unsupported PNM maxval: " + path);
}

std::vector<std::uint8_t> read_pnm(const std::string& path, std::string& magic,
                                   int& w, int& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  read_pnm_header(in, path, magic, w, h);
  const int ch = magic == "P6" ? 3 : 1;
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * ch);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw std::runtime_error("truncated PNM data: " + path);
  return bytes;
}

}  // namespace

void save_image(const Image& img, const std::string& path) {
  std::vector<std::uint8_t> bytes(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) bytes[i] = quantize8(img.data[i]);
  write_pnm(path, img.channels == 3 ? "P6" : "P5", img.height, img.width, bytes);
}

Image load_image(const std::string& path) {
  std::string magic;
  int w = 0, h = 0;
  const auto bytes = read_pnm(path, magic, w, h);
  if (magic != "P6" && magic != "P5") throw std::runtime_error("not a binary PNM: " + path);
  Image img(h, w, magic == "P6" ? 3 : 1);
  for (std::size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i] / 255.0;
  return img;
}

void save_labels_pgm(const std::vector<std::uint8_t>& labels, int height, int width,
                     const std::string& path) {
  if (static_cast<std::size_t>(height) * width != labels.size())
    throw std::invalid_argument("save_labels_pgm: shape mismatch");
  write_pnm(path, "P5", height, width, labels);
}

std::vector<std::uint8_t> load_labels_pgm(const std::string& path, int& height, int& width) {
  std::string magic;
  auto bytes = read_pnm(path, magic, width, height);
  if (magic != "P5") throw std::runtime_error("label map must be P5: " + path);
  return bytes;
}

}  // namespace crossview
