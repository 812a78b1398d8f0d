// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crossview::rng {

namespace {

// splitmix64 finalizer; full avalanche on 64 bits.
std::uint64_t avalanche(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  std::uint64_t h = avalanche(a);
  h = avalanche(h ^ (b + 0x2545f4914f6cdd1dULL));
  h = avalanche(h ^ (c + 0x9e3779b97f4a7c15ULL));
  h = avalanche(h ^ (d + 0xd6e8feb86659fd93ULL));
  return h;
}

double uniform01(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  const std::uint64_t bits = mix(seed, a, b, c);
  // 53 mantissa bits; +1 keeps the value strictly positive so log() is safe.
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  const std::uint64_t k = mix(seed, a, b, c);
  const double u1 = (static_cast<double>(mix(k, 1) >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = (static_cast<double>(mix(k, 2) >> 11) + 1.0) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int uniform_int(std::uint64_t seed, std::uint64_t a, std::uint64_t b, int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(mix(seed, a, b, 0x75e6) % span);
}

}  // namespace crossview::rng
