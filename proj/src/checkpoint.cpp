// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crossview {

void save_tensor_dump(const TensorDump& dump, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  char buf[64];
  for (const auto& [name, tensor] : dump) {
    std::size_t count = 1;
    out << name << " " << tensor.shape.size();
    for (int d : tensor.shape) {
      out << " " << d;
      count *= static_cast<std::size_t>(d);
    }
    if (count != tensor.values.size())
      throw std::invalid_argument("tensor dump: shape/value mismatch for " + name);
    out << " :";
    for (double v : tensor.values) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << " " << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TensorDump load_tensor_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  TensorDump dump;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name, colon;
    std::size_t ndim = 0;
    if (!(ls >> name >> ndim)) throw std::runtime_error("tensor dump: bad record");
    NamedTensor tensor;
    std::size_t count = 1;
    for (std::size_t i = 0; i < ndim; ++i) {
      int d = 0;
      if (!(ls >> d) || d <= 0) throw std::runtime_error("tensor dump: bad shape");
      tensor.shape.push_back(d);
      count *= static_cast<std::size_t>(d);
    }
    if (!(ls >> colon) || colon != ":") throw std::runtime_error("tensor dump: missing ':'");
    tensor.values.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      if (!(ls >> tensor.values[i])) throw std::runtime_error("tensor dump: truncated values");
    dump.emplace(std::move(name), std::move(tensor));
  }
  return dump;
}

}  // namespace crossview
