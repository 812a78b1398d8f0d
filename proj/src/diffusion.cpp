// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/diffusion.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "crossview/rng.hpp"

namespace crossview {

namespace {

// First three columns of the 4x4 normalized Hadamard matrix: an orthonormal
// lift from RGB means to the latent channel count.
constexpr double kLift[kLatentChannels][3] = {
    {0.5, 0.5, 0.5},
    {0.5, -0.5, 0.5},
    {0.5, 0.5, -0.5},
    {0.5, -0.5, -0.5},
};

}  // namespace

DiffusionSchedule DiffusionSchedule::linear(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw std::invalid_argument("schedule: steps must be >= 1");
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t)
    betas[static_cast<std::size_t>(t)] =
        steps == 1 ? beta_start
                   : beta_start + (beta_end - beta_start) * t / (steps - 1);
  return from_betas(std::move(betas));
}

DiffusionSchedule DiffusionSchedule::from_betas(std::vector<double> betas) {
  if (betas.empty()) throw std::invalid_argument("schedule: empty betas");
  double prev = 0.0;
  for (double b : betas) {
    if (!(b > 0.0) || !(b < 1.0))
      throw std::invalid_argument("schedule: betas must lie strictly in (0,1)");
    if (b < prev) throw std::invalid_argument("schedule: betas must be nondecreasing");
    prev = b;
  }
  DiffusionSchedule s;
  s.betas = std::move(betas);
  return s;
}

double DiffusionSchedule::abar(int t) const {
  if (t < 0 || t > steps()) throw std::domain_error("schedule: t out of range");
  double prod = 1.0;
  for (int s = 0; s < t; ++s) prod *= 1.0 - betas[static_cast<std::size_t>(s)];
  return prod;
}

std::string DiffusionSchedule::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double b : betas) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &b, sizeof(double));
    for (unsigned char byte : bytes) {
      h ^= byte;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LatentStack LatentStack::zeros(int view_count, int h, int w, int c) {
  LatentStack s;
  s.views.assign(static_cast<std::size_t>(view_count), Tensor3(h, w, c));
  return s;
}

bool LatentStack::same_shape(const LatentStack& o) const {
  if (views.size() != o.views.size()) return false;
  for (std::size_t i = 0; i < views.size(); ++i)
    if (!views[i].same_shape(o.views[i])) return false;
  return true;
}

Condition make_condition(const PerspectiveSemantics& sem, int class_count,
                         std::vector<double> prompt) {
  if (sem.height % kLatentFactor != 0 || sem.width % kLatentFactor != 0)
    throw std::invalid_argument("make_condition: image size not divisible by 8");
  const int h = sem.height / kLatentFactor, w = sem.width / kLatentFactor;
  Condition cond;
  cond.semantics_onehot = Tensor3(h, w, class_count);
  cond.prompt = std::move(prompt);
  std::vector<int> counts(static_cast<std::size_t>(class_count));
  for (int by = 0; by < h; ++by) {
    for (int bx = 0; bx < w; ++bx) {
      std::fill(counts.begin(), counts.end(), 0);
      for (int dy = 0; dy < kLatentFactor; ++dy)
        for (int dx = 0; dx < kLatentFactor; ++dx) {
          const std::uint8_t label = sem.at(by * kLatentFactor + dy, bx * kLatentFactor + dx);
          if (label >= class_count)
            throw std::invalid_argument("make_condition: label beyond class count");
          ++counts[label];
        }
      int best = 0;
      for (int k = 1; k < class_count; ++k)
        if (counts[static_cast<std::size_t>(k)] > counts[static_cast<std::size_t>(best)])
          best = k;
      cond.semantics_onehot.at(by, bx, best) = 1.0;
    }
  }
  return cond;
}

Tensor3 encode_image(const Image& image) {
  if (image.channels != 3) throw std::invalid_argument("encode_image: RGB input required");
  if (image.height % kLatentFactor != 0 || image.width % kLatentFactor != 0)
    throw std::invalid_argument("encode_image: size must be divisible by 8");
  const int h = image.height / kLatentFactor, w = image.width / kLatentFactor;
  Tensor3 latent(h, w, kLatentChannels);
  const double norm = 1.0 / (kLatentFactor * kLatentFactor);
  for (int by = 0; by < h; ++by) {
    for (int bx = 0; bx < w; ++bx) {
      std::array<double, 3> mean{0.0, 0.0, 0.0};
      for (int dy = 0; dy < kLatentFactor; ++dy)
        for (int dx = 0; dx < kLatentFactor; ++dx)
          for (int ch = 0; ch < 3; ++ch)
            mean[static_cast<std::size_t>(ch)] +=
                image.at(by * kLatentFactor + dy, bx * kLatentFactor + dx, ch);
      for (double& v : mean) v *= norm;
      for (int lc = 0; lc < kLatentChannels; ++lc)
        latent.at(by, bx, lc) = kLift[lc][0] * mean[0] + kLift[lc][1] * mean[1] +
                                kLift[lc][2] * mean[2];
    }
  }
  return latent;
}

Image decode_latent(const Tensor3& latent) {
  if (latent.channels != kLatentChannels)
    throw std::invalid_argument("decode_latent: wrong channel count");
  Image image(latent.height * kLatentFactor, latent.width * kLatentFactor, 3);
  for (int by = 0; by < latent.height; ++by) {
    for (int bx = 0; bx < latent.width; ++bx) {
      std::array<double, 3> rgb{0.0, 0.0, 0.0};
      for (int ch = 0; ch < 3; ++ch)
        for (int lc = 0; lc < kLatentChannels; ++lc)
          rgb[static_cast<std::size_t>(ch)] += kLift[lc][ch] * latent.at(by, bx, lc);
      // clamp into displayable range; exact for anything encode produced
      for (double& v : rgb) v = std::fmin(std::fmax(v, 0.0), 1.0);
      for (int dy = 0; dy < kLatentFactor; ++dy)
        for (int dx = 0; dx < kLatentFactor; ++dx)
          image.set_rgb(by * kLatentFactor + dy, bx * kLatentFactor + dx, rgb);
    }
  }
  return image;
}

NoiseStack sample_noise(std::uint64_t seed, int view_count, int h, int w, int c) {
  NoiseStack stack = LatentStack::zeros(view_count, h, w, c);
  for (int m = 0; m < view_count; ++m) {
    Tensor3& t = stack.views[static_cast<std::size_t>(m)];
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int ch = 0; ch < c; ++ch)
          t.at(y, x, ch) = rng::normal(seed, static_cast<std::uint64_t>(m + 1),
                                       static_cast<std::uint64_t>(y) * w + x,
                                       static_cast<std::uint64_t>(ch));
  }
  return stack;
}

namespace {

/// The cross-view value-assignment chain: m = 1, 2, ... while right_neighbor(m)
/// != 1, copying every valid source cell into its rounded target cell. Source
/// cells scan row-major, so later sources overwrite colliding targets.
void chain_reassign(LatentStack& stack, const std::vector<ViewPairMaps>& maps) {
  const int view_count = static_cast<int>(stack.views.size());
  if (maps.size() != stack.views.size())
    throw std::invalid_argument("reassign: maps/views count mismatch");
  for (int m = 1; right_neighbor(m, view_count) != 1; ++m) {
    const CorrespondenceMap& map = maps[static_cast<std::size_t>(m - 1)].to_right;
    const Tensor3& src = stack.views[static_cast<std::size_t>(m - 1)];
    Tensor3& dst = stack.views[static_cast<std::size_t>(map.target_view - 1)];
    if (map.height != src.height || map.width != src.width)
      throw std::invalid_argument("reassign: map grid does not match latents");
    for (int y = 0; y < map.height; ++y) {
      for (int x = 0; x < map.width; ++x) {
        const CorrespondenceEntry& e = map.at(y, x);
        if (!e.valid) continue;
        for (int ch = 0; ch < src.channels; ++ch)
          dst.at(e.iy, e.ix, ch) = src.at(y, x, ch);
      }
    }
  }
}

}  // namespace

NoiseStack sample_synced_noise(std::uint64_t seed, const std::vector<ViewPairMaps>& maps,
                               int view_count, int h, int w, int c) {
  NoiseStack stack = sample_noise(seed, view_count, h, w, c);
  chain_reassign(stack, maps);
  return stack;
}

LatentStack forward_noise(const LatentStack& l0, int t, const DiffusionSchedule& schedule,
                          const NoiseStack& noise) {
  if (t < 1 || t > schedule.steps())
    throw std::domain_error("forward_noise: t out of range");
  if (!l0.same_shape(noise)) throw std::invalid_argument("forward_noise: shape mismatch");
  const double a = std::sqrt(schedule.abar(t));
  const double b = std::sqrt(1.0 - schedule.abar(t));
  LatentStack out = l0;
  out.step = t;
  for (std::size_t m = 0; m < out.views.size(); ++m)
    for (std::size_t i = 0; i < out.views[m].data.size(); ++i)
      out.views[m].data[i] = a * l0.views[m].data[i] + b * noise.views[m].data[i];
  return out;
}

LatentStack reassign_latents(LatentStack latents, const std::vector<ViewPairMaps>& maps) {
  chain_reassign(latents, maps);
  return latents;
}

LatentStack denoise_step(const LatentStack& noisy, int t, const DenoiserFn& denoiser,
                         const std::vector<Condition>& conditions,
                         const DiffusionSchedule& schedule) {
  if (t < 1 || t > schedule.steps())
    throw std::domain_error("denoise_step: t out of range");
  const LatentStack eps = denoiser(noisy, t, conditions);
  if (!eps.same_shape(noisy))
    throw std::invalid_argument("denoise_step: denoiser output shape mismatch");
  const double a_t = std::sqrt(schedule.abar(t));
  const double b_t = std::sqrt(1.0 - schedule.abar(t));
  const double a_p = std::sqrt(schedule.abar(t - 1));
  const double b_p = std::sqrt(1.0 - schedule.abar(t - 1));
  LatentStack out = noisy;
  out.step = t - 1;
  for (std::size_t m = 0; m < out.views.size(); ++m) {
    for (std::size_t i = 0; i < out.views[m].data.size(); ++i) {
      const double e = eps.views[m].data[i];
      const double x0 = (noisy.views[m].data[i] - b_t * e) / a_t;
      out.views[m].data[i] = a_p * x0 + b_p * e;
    }
  }
  return out;
}

GenerateResult generate(const std::vector<Condition>& conditions, const CameraRig& rig,
                        const DenoiserFn& denoiser, const DiffusionSchedule& schedule,
                        const GenerateOptions& opts) {
  if (opts.cutoff_fraction < 0.0 || opts.cutoff_fraction > 1.0)
    throw std::invalid_argument("generate: cutoff_fraction must lie in [0,1]");
  const int view_count = rig.view_count();
  if (static_cast<int>(conditions.size()) != view_count)
    throw std::invalid_argument("generate: one condition per view required");
  if (rig.image_height % kLatentFactor != 0 || rig.image_width % kLatentFactor != 0)
    throw std::invalid_argument("generate: image size must be divisible by 8");
  const int h = rig.image_height / kLatentFactor;
  const int w = rig.image_width / kLatentFactor;

  const auto maps = build_all_maps(rig, h, w, kLatentFactor);
  const int steps = schedule.steps();
  const int chain_steps = static_cast<int>(std::floor(opts.cutoff_fraction * steps));

  LatentStack latents = opts.reassign
                            ? sample_synced_noise(opts.seed, maps, view_count, h, w,
                                                  kLatentChannels)
                            : sample_noise(opts.seed, view_count, h, w, kLatentChannels);
  latents.step = steps;

  GenerateResult result;
  for (int t = steps; t >= 1; --t) {
    latents = denoise_step(latents, t, denoiser, conditions, schedule);
    const int step_number = steps - t + 1;  // 1-based reverse step count
    if (opts.reassign && step_number <= chain_steps) {
      latents = reassign_latents(std::move(latents), maps);
      ++result.reassign_invocations;
    }
  }
  result.latents = std::move(latents);
  result.images.reserve(static_cast<std::size_t>(view_count));
  for (const auto& view : result.latents.views)
    result.images.push_back(decode_latent(view));
  return result;
}

namespace {

/// Any-coverage downsample of an image-resolution mask to the latent grid.
std::vector<std::uint8_t> downsample_mask(const Image& mask, int h, int w) {
  if (mask.channels != 1 || mask.height != h * kLatentFactor ||
      mask.width != w * kLatentFactor)
    throw std::invalid_argument("blend: mask resolution mismatch");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(h) * w, 0);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(y, x, 0) > 0.5)
        out[static_cast<std::size_t>(y / kLatentFactor) * w + x / kLatentFactor] = 1;
  return out;
}

}  // namespace

LatentStack blend_instance_latents(
    const LatentStack& scene,
    const std::vector<std::pair<LatentStack, InstanceMask>>& instances) {
  LatentStack out = scene;
  if (scene.views.empty()) return out;
  const int h = scene.views.front().height, w = scene.views.front().width;
  for (std::size_t m = 0; m < scene.views.size(); ++m) {
    std::vector<std::uint8_t> owner(static_cast<std::size_t>(h) * w, 0);
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto& [latent, mask] = instances[i];
      if (!latent.same_shape(scene))
        throw std::invalid_argument("blend: instance latent shape mismatch");
      if (mask.views.size() != scene.views.size())
        throw std::invalid_argument("blend: mask views mismatch");
      const auto cells = downsample_mask(mask.views[m], h, w);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!cells[static_cast<std::size_t>(y) * w + x]) continue;
          auto& cell_owner = owner[static_cast<std::size_t>(y) * w + x];
          if (cell_owner != 0)
            throw std::invalid_argument("blend: overlapping instance masks");
          cell_owner = static_cast<std::uint8_t>(i + 1);
          for (int ch = 0; ch < scene.views[m].channels; ++ch)
            out.views[m].at(y, x, ch) = latent.views[m].at(y, x, ch);
        }
      }
    }
  }
  return out;
}

DenoiserFn analytic_gaussian_denoiser(double mean, double variance,
                                      const DiffusionSchedule& schedule) {
  if (variance < 0.0)
    throw std::domain_error("analytic_gaussian_denoiser: variance must be >= 0");
  return [mean, variance, schedule](const LatentStack& noisy, int t,
                                    const std::vector<Condition>&) {
    const double a = std::sqrt(schedule.abar(t));
    const double b2 = 1.0 - schedule.abar(t);
    const double b = std::sqrt(b2);
    const double gain = a * variance / (a * a * variance + b2);
    LatentStack out = noisy;
    for (auto& view : out.views) {
      for (double& v : view.data) {
        const double posterior_mean = mean + gain * (v - a * mean);
        v = (v - a * posterior_mean) / b;
      }
    }
    return out;
  };
}

TrainingDraw training_draw(std::uint64_t seed, int sample_index, int steps) {
  TrainingDraw draw;
  draw.t = rng::uniform_int(seed, static_cast<std::uint64_t>(sample_index), 0x7e4, 1, steps);
  draw.noise_seed = rng::mix(seed, static_cast<std::uint64_t>(sample_index), 0x901e, 0);
  return draw;
}

double training_loss(const std::vector<LatentStack>& l0_batch,
                     const std::vector<std::vector<Condition>>& conditions,
                     const DenoiserFn& denoiser, const DiffusionSchedule& schedule,
                     const std::vector<ViewPairMaps>& maps, std::uint64_t seed) {
  if (l0_batch.empty()) throw std::invalid_argument("training_loss: empty batch");
  if (conditions.size() != l0_batch.size())
    throw std::invalid_argument("training_loss: conditions/batch mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < l0_batch.size(); ++i) {
    const LatentStack& l0 = l0_batch[i];
    const auto& front = l0.views.front();
    const TrainingDraw draw = training_draw(seed, static_cast<int>(i), schedule.steps());
    const NoiseStack noise =
        sample_synced_noise(draw.noise_seed, maps, static_cast<int>(l0.views.size()),
                            front.height, front.width, front.channels);
    const LatentStack noisy = forward_noise(l0, draw.t, schedule, noise);
    const LatentStack pred = denoiser(noisy, draw.t, conditions[i]);
    if (!pred.same_shape(l0))
      throw std::invalid_argument("training_loss: denoiser output shape mismatch");
    for (std::size_t m = 0; m < l0.views.size(); ++m)
      for (std::size_t k = 0; k < l0.views[m].data.size(); ++k) {
        const double d = noise.views[m].data[k] - pred.views[m].data[k];
        total += d * d;
      }
  }
  const double loss = total / static_cast<double>(l0_batch.size());
  if (!std::isfinite(loss)) throw std::domain_error("training_loss: non-finite loss");
  return loss;
}

}  // namespace crossview
