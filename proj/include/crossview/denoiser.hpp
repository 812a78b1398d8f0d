// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossview/attention.hpp"
#include "crossview/diffusion.hpp"

namespace crossview {

/// Small convolutional epsilon-predictor: per view, a 3x3 conv over
/// [latent | one-hot semantics | prompt | t/T] into a hidden feature map,
/// tanh, the multi-view attention block as a residual, then a 3x3 conv back
/// to the latent channels. Trains in seconds on the synthetic scenes.
class TinyDenoiser {
 public:
  struct Config {
    int latent_channels = kLatentChannels;
    int cond_channels = 5;   // class count of the one-hot semantics
    int prompt_dim = 4;
    int hidden = 8;          // must be divisible by 4 for the encoding
    int window = 3;          // attention K
  };

  TinyDenoiser(const Config& config, std::vector<ViewPairMaps> maps,
               std::uint64_t init_seed);

  LatentStack predict(const LatentStack& noisy, int t,
                      const std::vector<Condition>& conditions,
                      const DiffusionSchedule& schedule) const;

  /// Denoiser closure for the diffusion ops.
  DenoiserFn as_denoiser(const DiffusionSchedule& schedule) const;

  /// Eq.-style loss on one batch plus parameter gradients; same draws as
  /// training_loss (shared t, synchronized noise).
  double loss_and_gradients(const std::vector<LatentStack>& l0_batch,
                            const std::vector<std::vector<Condition>>& conditions,
                            const DiffusionSchedule& schedule, std::uint64_t seed,
                            std::vector<double>& gradients) const;

  /// Adam on the flattened parameters; returns the per-step losses.
  std::vector<double> train(const std::vector<LatentStack>& l0_batch,
                            const std::vector<std::vector<Condition>>& conditions,
                            const DiffusionSchedule& schedule, std::uint64_t seed,
                            int steps, double learning_rate = 1e-2);

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  const Config& config() const { return config_; }

  void save(const std::string& path) const;
  static TinyDenoiser load(const std::string& path, std::vector<ViewPairMaps> maps);

 private:
  struct Forward;  // per-sample activations kept for the backward pass

  int in_channels() const;
  Forward run_forward(const LatentStack& noisy, int t,
                      const std::vector<Condition>& conditions,
                      const DiffusionSchedule& schedule) const;
  void run_backward(const Forward& fwd, const LatentStack& d_eps,
                    std::vector<double>& gradients) const;

  Config config_;
  std::vector<ViewPairMaps> maps_;
  std::vector<double> params_;

  // Parameter layout offsets into params_.
  std::size_t off_w1_, off_b1_, off_q_, off_k_, off_v_, off_w2_, off_b2_, total_;
};

}  // namespace crossview
