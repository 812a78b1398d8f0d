// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace crossview {

/// Runs the command-line pipeline. args excludes the program name.
/// Exit codes: 0 success, 2 usage or I/O error, 3 numeric or domain error.
int run_cli(const std::vector<std::string>& args);

}  // namespace crossview
