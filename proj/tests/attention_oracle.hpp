// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Exhaustive scalar reference for the multi-view attention formula: plain
// loops and arrays, no shared code with the vectorized implementation. Both
// the unit tests and the acceptance suite check against this.

#include <cmath>
#include <numbers>
#include <vector>

#include "crossview/attention.hpp"

namespace crossview::testing {

inline std::vector<double> oracle_encoding(double dx, double dy, int c, double max_wl) {
  const int freqs = c / 4;
  std::vector<double> enc(static_cast<std::size_t>(c), 0.0);
  for (int i = 0; i < freqs; ++i) {
    const double wl = freqs == 1 ? 1.0 : std::pow(max_wl, double(i) / (freqs - 1));
    enc[static_cast<std::size_t>(4 * i) + 0] = std::sin(2.0 * std::numbers::pi * dx / wl);
    enc[static_cast<std::size_t>(4 * i) + 1] = std::cos(2.0 * std::numbers::pi * dx / wl);
    enc[static_cast<std::size_t>(4 * i) + 2] = std::sin(2.0 * std::numbers::pi * dy / wl);
    enc[static_cast<std::size_t>(4 * i) + 3] = std::cos(2.0 * std::numbers::pi * dy / wl);
  }
  return enc;
}

inline std::vector<double> oracle_matvec(const Eigen::MatrixXd& m,
                                         const std::vector<double>& v) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()), 0.0);
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      out[static_cast<std::size_t>(r)] += m(r, c) * v[static_cast<std::size_t>(c)];
  return out;
}

inline double oracle_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<FeatureMap> oracle_attention(const std::vector<FeatureMap>& features,
                                                const AttentionParams& params,
                                                const std::vector<ViewPairMaps>& maps,
                                                int window) {
  const int h = features.front().height, w = features.front().width;
  const int c = features.front().channels;
  const double max_wl = 2.0 * std::max(h, w);
  std::vector<FeatureMap> out(features.size(), FeatureMap(h, w, c));

  for (std::size_t mi = 0; mi < features.size(); ++mi) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        std::vector<std::vector<double>> cand;
        for (const CorrespondenceMap* map : {&maps[mi].to_right, &maps[mi].to_left}) {
          const auto& e = map->at(y, x);
          if (!e.valid) continue;
          const FeatureMap& nf =
              features[static_cast<std::size_t>(map->target_view - 1)];
          const int r = window / 2;
          for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
              const int ty = e.iy + dy, tx = e.ix + dx;
              if (ty < 0 || ty >= h || tx < 0 || tx >= w) continue;
              std::vector<double> f(static_cast<std::size_t>(c));
              for (int ch = 0; ch < c; ++ch)
                f[static_cast<std::size_t>(ch)] = nf.at(ty, tx, ch);
              if (params.use_encoding) {
                const Eigen::Vector3d back =
                    map->latent_inverse.m * Eigen::Vector3d(tx, ty, 1.0);
                if (std::abs(back.z()) > 1e-12) {
                  const auto enc = oracle_encoding(back.x() / back.z() - x,
                                                   back.y() / back.z() - y, c, max_wl);
                  for (int ch = 0; ch < c; ++ch)
                    f[static_cast<std::size_t>(ch)] += enc[static_cast<std::size_t>(ch)];
                }
              }
              cand.push_back(std::move(f));
            }
          }
        }
        if (cand.empty()) continue;

        std::vector<double> fp(static_cast<std::size_t>(c));
        for (int ch = 0; ch < c; ++ch)
          fp[static_cast<std::size_t>(ch)] = features[mi].at(y, x, ch);
        const std::vector<double> q = oracle_matvec(params.query, fp);

        std::vector<double> scores;
        scores.reserve(cand.size());
        for (const auto& f : cand)
          scores.push_back(oracle_dot(q, oracle_matvec(params.key, f)));
        double peak = scores[0];
        for (double s : scores) peak = std::max(peak, s);
        double total = 0.0;
        std::vector<double> weights;
        for (double s : scores) {
          weights.push_back(std::exp(s - peak));
          total += weights.back();
        }
        for (double& wgt : weights) wgt /= total;

        for (std::size_t j = 0; j < cand.size(); ++j) {
          const auto value = oracle_matvec(params.value, cand[j]);
          for (int ch = 0; ch < c; ++ch)
            out[mi].at(y, x, ch) += weights[j] * value[static_cast<std::size_t>(ch)];
        }
      }
    }
  }
  return out;
}

}  // namespace crossview::testing
