// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace crossview::rng {

// Counter-based deterministic generator. Every draw is a pure function of its
// key words, so results do not depend on call order or thread count.

/// Mixes up to four 64-bit words into one avalanched 64-bit value.
std::uint64_t mix(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                  std::uint64_t d = 0);

/// Uniform double in (0, 1], derived from a mixed key.
double uniform01(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                 std::uint64_t c = 0);

/// Standard normal draw keyed by (seed, a, b, c); Box-Muller on two counter lanes.
double normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
              std::uint64_t c = 0);

/// Uniform integer in [lo, hi] keyed by (seed, a, b).
int uniform_int(std::uint64_t seed, std::uint64_t a, std::uint64_t b, int lo, int hi);

}  // namespace crossview::rng
