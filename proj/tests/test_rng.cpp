// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crossview/rng.hpp"

using namespace crossview;

TEST_CASE("draws are pure functions of their key") {
  CHECK(rng::normal(1, 2, 3, 4) == rng::normal(1, 2, 3, 4));
  CHECK(rng::uniform01(9, 8, 7) == rng::uniform01(9, 8, 7));
  CHECK(rng::normal(1, 2, 3, 4) != rng::normal(1, 2, 3, 5));
  CHECK(rng::normal(1, 2, 3, 4) != rng::normal(2, 2, 3, 4));
}

TEST_CASE("uniform01 stays in (0, 1]") {
  for (int i = 0; i < 10000; ++i) {
    const double u = rng::uniform01(42, static_cast<std::uint64_t>(i));
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("normal draws have standard moments") {
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng::normal(7, static_cast<std::uint64_t>(i));
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("uniform_int covers its range roughly evenly") {
  int counts[6] = {0};
  for (int i = 0; i < 60000; ++i) {
    const int v = rng::uniform_int(5, static_cast<std::uint64_t>(i), 0, 1, 6);
    REQUIRE(v >= 1);
    REQUIRE(v <= 6);
    ++counts[v - 1];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK_THROWS_AS(rng::uniform_int(1, 2, 3, 5, 4), std::invalid_argument);
}
