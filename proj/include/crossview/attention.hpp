// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "crossview/correspondence.hpp"
#include "crossview/tensor.hpp"

namespace crossview {

using FeatureMap = Tensor3;  // h x w x c, one view

struct AttentionParams {
  Eigen::MatrixXd query;  // c x c
  Eigen::MatrixXd key;
  Eigen::MatrixXd value;
  bool use_encoding = true;

  static AttentionParams random(int channels, std::uint64_t seed, double scale = 0.2);
};

/// Sinusoidal encoding of a 2D grid displacement: channels/4 geometric
/// frequencies spanning wavelengths 1 to max_wavelength, interleaved
/// [sin(dx), cos(dx), sin(dy), cos(dy)] per frequency. channels must be
/// divisible by 4 (std::invalid_argument otherwise).
std::vector<double> displacement_encoding(double dx, double dy, int channels,
                                          double max_wavelength);

/// Multi-view attention: for every valid pixel p of view m, scores between the
/// query projection of F_m(p) and key projections of neighbor features at the
/// K x K window around the mapped pixel, each neighbor feature offset by the
/// displacement encoding of (inverse-mapped window pixel - p). One softmax
/// over the joint candidate set of both neighbors; output is the weighted sum
/// of value projections, or zero where no neighbor correspondence is valid.
/// maps[m-1] holds view m's pair maps; all views share the feature shape.
std::vector<FeatureMap> mv_attention(const std::vector<FeatureMap>& features,
                                     const AttentionParams& params,
                                     const std::vector<ViewPairMaps>& maps, int window);

/// features + mv_attention(features, ...) per view.
std::vector<FeatureMap> attend_residual(const std::vector<FeatureMap>& features,
                                        const AttentionParams& params,
                                        const std::vector<ViewPairMaps>& maps, int window);

/// Softmax weights of one pixel's candidate set (empty when no candidates).
std::vector<double> attention_weights_at(const std::vector<FeatureMap>& features,
                                         const AttentionParams& params,
                                         const std::vector<ViewPairMaps>& maps,
                                         int window, int view, int y, int x);

/// Flat decimal tensor dump with a shape header per matrix.
void save_attention_params(const AttentionParams& params, const std::string& path);
AttentionParams load_attention_params(const std::string& path);

struct AttentionGrads {
  Eigen::MatrixXd d_query;
  Eigen::MatrixXd d_key;
  Eigen::MatrixXd d_value;
  std::vector<FeatureMap> d_features;
};

/// Gradients of sum(d_out .* mv_attention(features)) with respect to the
/// projection matrices and the input features.
AttentionGrads mv_attention_backward(const std::vector<FeatureMap>& features,
                                     const AttentionParams& params,
                                     const std::vector<ViewPairMaps>& maps, int window,
                                     const std::vector<FeatureMap>& d_out);

}  // namespace crossview
