// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "crossview/cli.hpp"

int main(int argc, char** argv) {
  return crossview::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
