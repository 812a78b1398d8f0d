// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

namespace crossview {

/// Flat decimal tensor dump. One record per tensor:
///   name ndim d0 d1 ... : v0 v1 ...
/// Values carry 17 significant digits, so doubles round-trip exactly.
struct NamedTensor {
  std::vector<int> shape;
  std::vector<double> values;
};
using TensorDump = std::map<std::string, NamedTensor>;

void save_tensor_dump(const TensorDump& dump, const std::string& path);
TensorDump load_tensor_dump(const std::string& path);

}  // namespace crossview
