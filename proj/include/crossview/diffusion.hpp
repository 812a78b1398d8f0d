// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "crossview/camera.hpp"
#include "crossview/correspondence.hpp"
#include "crossview/image.hpp"
#include "crossview/instance_mask.hpp"
#include "crossview/tensor.hpp"
#include "crossview/view_projection.hpp"

namespace crossview {

inline constexpr int kLatentChannels = 4;
inline constexpr int kLatentFactor = 8;  // image H/h = W/w

/// Variance schedule: betas strictly inside (0,1) and nondecreasing; the
/// cumulative signal fraction abar(t) = prod(1 - beta_s) is strictly
/// decreasing with abar(0) = 1.
struct DiffusionSchedule {
  std::vector<double> betas;

  static DiffusionSchedule linear(int steps = 50, double beta_start = 1e-4,
                                  double beta_end = 2e-2);
  static DiffusionSchedule from_betas(std::vector<double> betas);

  int steps() const { return static_cast<int>(betas.size()); }
  double abar(int t) const;  // t in [0, steps]
  std::string hash() const;  // FNV-1a over the beta bytes, hex
};

/// One tensor per view plus the diffusion step the stack sits at.
struct LatentStack {
  std::vector<Tensor3> views;
  int step = 0;

  static LatentStack zeros(int view_count, int h, int w, int c);
  bool same_shape(const LatentStack& o) const;
};
using NoiseStack = LatentStack;

/// Per-view conditioning: one-hot semantics at latent resolution plus a
/// fixed-length prompt vector.
struct Condition {
  Tensor3 semantics_onehot;  // h x w x class_count
  std::vector<double> prompt;
};

/// Majority label per 8x8 block (ties to the smaller id), one-hot encoded.
Condition make_condition(const PerspectiveSemantics& sem, int class_count,
                         std::vector<double> prompt);

// Stub latent codec. Encode averages each 8x8 block per RGB channel and lifts
// the 3-vector to kLatentChannels by a fixed orthogonal matrix; decode is the
// transpose lift plus nearest upsample. Exact round trip on block-constant
// images.
Tensor3 encode_image(const Image& image);
Image decode_latent(const Tensor3& latent);

/// Independent standard-normal draws, keyed by (seed, view, cell, channel).
NoiseStack sample_noise(std::uint64_t seed, int view_count, int h, int w, int c);

/// Independent draws followed by the cross-view re-assignment chain: starting
/// at view 1 and following right neighbors while m_r != 1, every valid source
/// cell overwrites its rounded target cell in the neighbor (row-major source
/// order, later writes win). maps[m-1] are view m's pair maps.
NoiseStack sample_synced_noise(std::uint64_t seed, const std::vector<ViewPairMaps>& maps,
                               int view_count, int h, int w, int c);

/// l_t = sqrt(abar_t) l0 + sqrt(1 - abar_t) noise, per view.
LatentStack forward_noise(const LatentStack& l0, int t, const DiffusionSchedule& schedule,
                          const NoiseStack& noise);

/// Same chain as sample_synced_noise applied to intermediate latents;
/// idempotent because the chain never writes back into view 1.
LatentStack reassign_latents(LatentStack latents, const std::vector<ViewPairMaps>& maps);

using DenoiserFn = std::function<LatentStack(const LatentStack& noisy, int t,
                                             const std::vector<Condition>& conditions)>;

/// Deterministic reverse update: the x0 estimate (l_t - sqrt(1-abar_t) eps) /
/// sqrt(abar_t) re-noised to level t-1.
LatentStack denoise_step(const LatentStack& noisy, int t, const DenoiserFn& denoiser,
                         const std::vector<Condition>& conditions,
                         const DiffusionSchedule& schedule);

struct GenerateOptions {
  bool reassign = true;          // synced start noise + chain re-assignment
  double cutoff_fraction = 0.6;  // chain applied after the first floor(f*T) steps
  std::uint64_t seed = 0;
};

struct GenerateResult {
  std::vector<Image> images;
  LatentStack latents;
  int reassign_invocations = 0;
};

GenerateResult generate(const std::vector<Condition>& conditions, const CameraRig& rig,
                        const DenoiserFn& denoiser, const DiffusionSchedule& schedule,
                        const GenerateOptions& opts);

/// Masked composition at latent resolution: a latent cell belongs to an
/// instance when any pixel of its 8x8 block is masked; remaining cells keep
/// the scene latent. Overlapping downsampled masks raise
/// std::invalid_argument.
LatentStack blend_instance_latents(
    const LatentStack& scene,
    const std::vector<std::pair<LatentStack, InstanceMask>>& instances);

/// Optimal epsilon-prediction when l0 ~ N(mean, variance I), elementwise.
DenoiserFn analytic_gaussian_denoiser(double mean, double variance,
                                      const DiffusionSchedule& schedule);

struct TrainingDraw {
  int t = 0;
  std::uint64_t noise_seed = 0;
};
/// The shared noise level and noise stream for one multi-view batch sample;
/// deterministic in (seed, sample), so test oracles can mirror the draws.
TrainingDraw training_draw(std::uint64_t seed, int sample_index, int steps);

/// Mean over the batch of sum_m ||eps_m - denoiser_m||^2 with one shared t and
/// synchronized noise per sample. Throws std::domain_error on a non-finite
/// result.
double training_loss(const std::vector<LatentStack>& l0_batch,
                     const std::vector<std::vector<Condition>>& conditions,
                     const DenoiserFn& denoiser, const DiffusionSchedule& schedule,
                     const std::vector<ViewPairMaps>& maps, std::uint64_t seed);

}  // namespace crossview
