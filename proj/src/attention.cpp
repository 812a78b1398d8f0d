// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/attention.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "crossview/checkpoint.hpp"
#include "crossview/rng.hpp"

namespace crossview {

AttentionParams AttentionParams::random(int channels, std::uint64_t seed, double scale) {
  AttentionParams p;
  p.query.resize(channels, channels);
  p.key.resize(channels, channels);
  p.value.resize(channels, channels);
  for (int which = 0; which < 3; ++which) {
    Eigen::MatrixXd& m = which == 0 ? p.query : which == 1 ? p.key : p.value;
    for (int r = 0; r < channels; ++r)
      for (int c = 0; c < channels; ++c)
        m(r, c) = scale * rng::normal(seed, 0xa77e + which, r, c);
  }
  return p;
}

std::vector<double> displacement_encoding(double dx, double dy, int channels,
                                          double max_wavelength) {
  if (channels % 4 != 0)
    throw std::invalid_argument("displacement_encoding: channels must be divisible by 4");
  const int freqs = channels / 4;
  std::vector<double> enc(static_cast<std::size_t>(channels));
  for (int i = 0; i < freqs; ++i) {
    const double wavelength =
        freqs == 1 ? 1.0
                   : std::pow(max_wavelength, static_cast<double>(i) / (freqs - 1));
    const double wx = 2.0 * std::numbers::pi * dx / wavelength;
    const double wy = 2.0 * std::numbers::pi * dy / wavelength;
    enc[static_cast<std::size_t>(4 * i) + 0] = std::sin(wx);
    enc[static_cast<std::size_t>(4 * i) + 1] = std::cos(wx);
    enc[static_cast<std::size_t>(4 * i) + 2] = std::sin(wy);
    enc[static_cast<std::size_t>(4 * i) + 3] = std::cos(wy);
  }
  return enc;
}

namespace {

NamedTensor matrix_tensor(const Eigen::MatrixXd& m) {
  NamedTensor t;
  t.shape = {static_cast<int>(m.rows()), static_cast<int>(m.cols())};
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) t.values.push_back(m(r, c));
  return t;
}

Eigen::MatrixXd tensor_matrix(const NamedTensor& t) {
  if (t.shape.size() != 2) throw std::runtime_error("attention params: expected a matrix");
  Eigen::MatrixXd m(t.shape[0], t.shape[1]);
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      m(r, c) = t.values[static_cast<std::size_t>(r) * t.shape[1] + c];
  return m;
}

}  // namespace

void save_attention_params(const AttentionParams& params, const std::string& path) {
  TensorDump dump;
  dump["query"] = matrix_tensor(params.query);
  dump["key"] = matrix_tensor(params.key);
  dump["value"] = matrix_tensor(params.value);
  dump["use_encoding"] = {{1}, {params.use_encoding ? 1.0 : 0.0}};
  save_tensor_dump(dump, path);
}

AttentionParams load_attention_params(const std::string& path) {
  const TensorDump dump = load_tensor_dump(path);
  AttentionParams params;
  params.query = tensor_matrix(dump.at("query"));
  params.key = tensor_matrix(dump.at("key"));
  params.value = tensor_matrix(dump.at("value"));
  params.use_encoding = dump.at("use_encoding").values.at(0) != 0.0;
  return params;
}

namespace {

struct Candidate {
  int view = 0;  // 1-based neighbor view
  int y = 0, x = 0;
  Eigen::VectorXd feature;  // neighbor feature plus displacement encoding
};

void check_shapes(const std::vector<FeatureMap>& features, const AttentionParams& params,
                  const std::vector<ViewPairMaps>& maps) {
  if (features.empty()) throw std::invalid_argument("mv_attention: no views");
  const FeatureMap& f0 = features.front();
  for (const auto& f : features)
    if (!f.same_shape(f0)) throw std::invalid_argument("mv_attention: shape mismatch");
  if (maps.size() != features.size())
    throw std::invalid_argument("mv_attention: maps/views count mismatch");
  for (const auto& pm : maps)
    if (pm.to_right.height != f0.height || pm.to_right.width != f0.width ||
        pm.to_left.height != f0.height || pm.to_left.width != f0.width)
      throw std::invalid_argument("mv_attention: map grid does not match features");
  const int c = f0.channels;
  if (params.query.rows() != c || params.query.cols() != c || params.key.rows() != c ||
      params.key.cols() != c || params.value.rows() != c || params.value.cols() != c)
    throw std::invalid_argument("mv_attention: projection matrices must be c x c");
}

Eigen::VectorXd feature_at(const FeatureMap& f, int y, int x) {
  Eigen::VectorXd v(f.channels);
  for (int ch = 0; ch < f.channels; ++ch) v(ch) = f.at(y, x, ch);
  return v;
}

/// Joint candidate set of one query pixel across both neighbor maps.
std::vector<Candidate> gather_candidates(const std::vector<FeatureMap>& features,
                                         const AttentionParams& params,
                                         const ViewPairMaps& pair, int window, int y,
                                         int x) {
  std::vector<Candidate> out;
  const int c = features.front().channels;
  const double max_wl =
      2.0 * std::max(features.front().height, features.front().width);
  for (const CorrespondenceMap* map : {&pair.to_right, &pair.to_left}) {
    const CorrespondenceEntry& e = map->at(y, x);
    if (!e.valid) continue;
    const FeatureMap& nf = features[static_cast<std::size_t>(map->target_view - 1)];
    const int r = window / 2;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const int ty = e.iy + dy, tx = e.ix + dx;
        if (ty < 0 || ty >= map->height || tx < 0 || tx >= map->width) continue;
        Candidate cand;
        cand.view = map->target_view;
        cand.y = ty;
        cand.x = tx;
        cand.feature = feature_at(nf, ty, tx);
        if (params.use_encoding) {
          // Displacement between the query pixel and the window pixel pulled
          // back into the query view through the inverse homography.
          const Eigen::Vector3d back =
              map->latent_inverse.m * Eigen::Vector3d(tx, ty, 1.0);
          if (std::abs(back.z()) > 1e-12) {
            const double bx = back.x() / back.z(), by = back.y() / back.z();
            const auto enc = displacement_encoding(bx - x, by - y, c, max_wl);
            for (int ch = 0; ch < c; ++ch) cand.feature(ch) += enc[static_cast<std::size_t>(ch)];
          }
        }
        out.push_back(std::move(cand));
      }
    }
  }
  return out;
}

std::vector<double> softmax_weights(const Eigen::VectorXd& scores) {
  const double peak = scores.maxCoeff();
  std::vector<double> w(static_cast<std::size_t>(scores.size()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    w[static_cast<std::size_t>(i)] = std::exp(scores(i) - peak);
    total += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

std::vector<FeatureMap> mv_attention(const std::vector<FeatureMap>& features,
                                     const AttentionParams& params,
                                     const std::vector<ViewPairMaps>& maps, int window) {
  check_shapes(features, params, maps);
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("mv_attention: window must be odd and >= 1");
  const FeatureMap& f0 = features.front();
  std::vector<FeatureMap> out(features.size(),
                              FeatureMap(f0.height, f0.width, f0.channels));
  for (std::size_t mi = 0; mi < features.size(); ++mi) {
    const FeatureMap& fm = features[mi];
    for (int y = 0; y < f0.height; ++y) {
      for (int x = 0; x < f0.width; ++x) {
        const auto cands = gather_candidates(features, params, maps[mi], window, y, x);
        if (cands.empty()) continue;  // zero vector where nothing overlaps
        const Eigen::VectorXd q = params.query * feature_at(fm, y, x);
        Eigen::VectorXd scores(static_cast<Eigen::Index>(cands.size()));
        for (std::size_t j = 0; j < cands.size(); ++j)
          scores(static_cast<Eigen::Index>(j)) = q.dot(params.key * cands[j].feature);
        const auto w = softmax_weights(scores);
        Eigen::VectorXd pooled = Eigen::VectorXd::Zero(f0.channels);
        for (std::size_t j = 0; j < cands.size(); ++j) pooled += w[j] * cands[j].feature;
        const Eigen::VectorXd a = params.value * pooled;
        for (int ch = 0; ch < f0.channels; ++ch)
          out[mi].at(y, x, ch) = a(ch);
      }
    }
  }
  return out;
}

std::vector<FeatureMap> attend_residual(const std::vector<FeatureMap>& features,
                                        const AttentionParams& params,
                                        const std::vector<ViewPairMaps>& maps,
                                        int window) {
  auto out = mv_attention(features, params, maps, window);
  for (std::size_t mi = 0; mi < features.size(); ++mi)
    for (std::size_t i = 0; i < out[mi].data.size(); ++i)
      out[mi].data[i] += features[mi].data[i];
  return out;
}

std::vector<double> attention_weights_at(const std::vector<FeatureMap>& features,
                                         const AttentionParams& params,
                                         const std::vector<ViewPairMaps>& maps,
                                         int window, int view, int y, int x) {
  check_shapes(features, params, maps);
  const auto cands = gather_candidates(features, params,
                                       maps[static_cast<std::size_t>(view - 1)], window,
                                       y, x);
  if (cands.empty()) return {};
  const Eigen::VectorXd q =
      params.query * feature_at(features[static_cast<std::size_t>(view - 1)], y, x);
  Eigen::VectorXd scores(static_cast<Eigen::Index>(cands.size()));
  for (std::size_t j = 0; j < cands.size(); ++j)
    scores(static_cast<Eigen::Index>(j)) = q.dot(params.key * cands[j].feature);
  return softmax_weights(scores);
}

AttentionGrads mv_attention_backward(const std::vector<FeatureMap>& features,
                                     const AttentionParams& params,
                                     const std::vector<ViewPairMaps>& maps, int window,
                                     const std::vector<FeatureMap>& d_out) {
  check_shapes(features, params, maps);
  const FeatureMap& f0 = features.front();
  const int c = f0.channels;
  AttentionGrads g;
  g.d_query = Eigen::MatrixXd::Zero(c, c);
  g.d_key = Eigen::MatrixXd::Zero(c, c);
  g.d_value = Eigen::MatrixXd::Zero(c, c);
  g.d_features.assign(features.size(), FeatureMap(f0.height, f0.width, c));

  for (std::size_t mi = 0; mi < features.size(); ++mi) {
    const FeatureMap& fm = features[mi];
    for (int y = 0; y < f0.height; ++y) {
      for (int x = 0; x < f0.width; ++x) {
        const auto cands = gather_candidates(features, params, maps[mi], window, y, x);
        if (cands.empty()) continue;
        const Eigen::VectorXd fp = feature_at(fm, y, x);
        const Eigen::VectorXd q = params.query * fp;
        Eigen::VectorXd scores(static_cast<Eigen::Index>(cands.size()));
        std::vector<Eigen::VectorXd> keyed(cands.size());
        for (std::size_t j = 0; j < cands.size(); ++j) {
          keyed[j] = params.key * cands[j].feature;
          scores(static_cast<Eigen::Index>(j)) = q.dot(keyed[j]);
        }
        const auto w = softmax_weights(scores);
        Eigen::VectorXd pooled = Eigen::VectorXd::Zero(c);
        for (std::size_t j = 0; j < cands.size(); ++j) pooled += w[j] * cands[j].feature;

        Eigen::VectorXd up(c);
        for (int ch = 0; ch < c; ++ch) up(ch) = d_out[mi].at(y, x, ch);

        // out = V * pooled
        g.d_value += up * pooled.transpose();
        const Eigen::VectorXd d_pooled = params.value.transpose() * up;

        // softmax jacobian: ds_j = w_j (f_j - pooled) . d_pooled
        const double pooled_dot = pooled.dot(d_pooled);
        Eigen::VectorXd dq_vec = Eigen::VectorXd::Zero(c);
        for (std::size_t j = 0; j < cands.size(); ++j) {
          const double ds = w[j] * (cands[j].feature.dot(d_pooled) - pooled_dot);
          dq_vec += ds * keyed[j];
          g.d_key += ds * q * cands[j].feature.transpose();
          // candidate feature receives value-path and key-path gradients
          const Eigen::VectorXd d_feat =
              w[j] * d_pooled + ds * (params.key.transpose() * q);
          FeatureMap& df = g.d_features[static_cast<std::size_t>(cands[j].view - 1)];
          for (int ch = 0; ch < c; ++ch) df.at(cands[j].y, cands[j].x, ch) += d_feat(ch);
        }
        g.d_query += dq_vec * fp.transpose();
        const Eigen::VectorXd d_fp = params.query.transpose() * dq_vec;
        for (int ch = 0; ch < c; ++ch) g.d_features[mi].at(y, x, ch) += d_fp(ch);
      }
    }
  }
  return g;
}

}  // namespace crossview
