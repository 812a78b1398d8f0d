// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/denoiser.hpp"

#include <cmath>
#include <stdexcept>

#include "crossview/checkpoint.hpp"
#include "crossview/rng.hpp"

namespace crossview {

namespace {

// 3x3 same-padding correlation. Weights laid out [out][in][ky][kx].
void conv3x3(const Tensor3& in, const double* w, const double* b, int out_ch,
             Tensor3& out) {
  const int h = in.height, wd = in.width, ic = in.channels;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wd; ++x) {
      for (int o = 0; o < out_ch; ++o) {
        double acc = b[o];
        for (int ky = 0; ky < 3; ++ky) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= wd) continue;
            const double* wrow = w + ((static_cast<std::size_t>(o) * ic) * 9);
            for (int i = 0; i < ic; ++i)
              acc += wrow[static_cast<std::size_t>(i) * 9 + ky * 3 + kx] *
                     in.at(sy, sx, i);
          }
        }
        out.at(y, x, o) = acc;
      }
    }
  }
}

void conv3x3_backward(const Tensor3& in, const Tensor3& d_out, const double* w,
                      double* d_w, double* d_b, Tensor3* d_in) {
  const int h = in.height, wd = in.width, ic = in.channels, oc = d_out.channels;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wd; ++x) {
      for (int o = 0; o < oc; ++o) {
        const double g = d_out.at(y, x, o);
        if (g == 0.0) continue;
        d_b[o] += g;
        for (int ky = 0; ky < 3; ++ky) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= wd) continue;
            for (int i = 0; i < ic; ++i) {
              const std::size_t wi =
                  (static_cast<std::size_t>(o) * ic + i) * 9 + ky * 3 + kx;
              d_w[wi] += g * in.at(sy, sx, i);
              if (d_in) d_in->at(sy, sx, i) += g * w[wi];
            }
          }
        }
      }
    }
  }
}

}  // namespace

struct TinyDenoiser::Forward {
  std::vector<Tensor3> inputs;      // per view, concatenated conditioning
  std::vector<Tensor3> activated;   // tanh(conv1), the attention input
  std::vector<Tensor3> fused;       // activated + attention
  LatentStack prediction;
};

int TinyDenoiser::in_channels() const {
  return config_.latent_channels + config_.cond_channels + config_.prompt_dim + 1;
}

TinyDenoiser::TinyDenoiser(const Config& config, std::vector<ViewPairMaps> maps,
                           std::uint64_t init_seed)
    : config_(config), maps_(std::move(maps)) {
  if (config_.hidden % 4 != 0)
    throw std::invalid_argument("TinyDenoiser: hidden must be divisible by 4");
  const std::size_t ic = static_cast<std::size_t>(in_channels());
  const std::size_t hid = static_cast<std::size_t>(config_.hidden);
  const std::size_t lat = static_cast<std::size_t>(config_.latent_channels);
  off_w1_ = 0;
  off_b1_ = off_w1_ + hid * ic * 9;
  off_q_ = off_b1_ + hid;
  off_k_ = off_q_ + hid * hid;
  off_v_ = off_k_ + hid * hid;
  off_w2_ = off_v_ + hid * hid;
  off_b2_ = off_w2_ + lat * hid * 9;
  total_ = off_b2_ + lat;
  params_.assign(total_, 0.0);

  const double s1 = 1.0 / std::sqrt(static_cast<double>(ic) * 9.0);
  const double sa = 1.0 / std::sqrt(static_cast<double>(hid));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hid) * 9.0);
  for (std::size_t i = off_w1_; i < off_b1_; ++i)
    params_[i] = s1 * rng::normal(init_seed, 1, i);
  for (std::size_t i = off_q_; i < off_w2_; ++i)
    params_[i] = sa * rng::normal(init_seed, 2, i);
  for (std::size_t i = off_w2_; i < off_b2_; ++i)
    params_[i] = s2 * rng::normal(init_seed, 3, i);
}

TinyDenoiser::Forward TinyDenoiser::run_forward(const LatentStack& noisy, int t,
                                                const std::vector<Condition>& conditions,
                                                const DiffusionSchedule& schedule) const {
  const std::size_t views = noisy.views.size();
  if (conditions.size() != views)
    throw std::invalid_argument("TinyDenoiser: one condition per view required");
  if (maps_.size() != views)
    throw std::invalid_argument("TinyDenoiser: maps built for a different view count");
  const int h = noisy.views.front().height, w = noisy.views.front().width;
  const double t_frac = static_cast<double>(t) / schedule.steps();

  Forward fwd;
  fwd.inputs.reserve(views);
  fwd.activated.reserve(views);
  for (std::size_t m = 0; m < views; ++m) {
    const Tensor3& lat = noisy.views[m];
    const Condition& cond = conditions[m];
    if (lat.channels != config_.latent_channels ||
        cond.semantics_onehot.height != h || cond.semantics_onehot.width != w ||
        cond.semantics_onehot.channels != config_.cond_channels ||
        static_cast<int>(cond.prompt.size()) != config_.prompt_dim)
      throw std::invalid_argument("TinyDenoiser: condition shape mismatch");

    Tensor3 input(h, w, in_channels());
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        int ch = 0;
        for (int i = 0; i < config_.latent_channels; ++i) input.at(y, x, ch++) = lat.at(y, x, i);
        for (int i = 0; i < config_.cond_channels; ++i)
          input.at(y, x, ch++) = cond.semantics_onehot.at(y, x, i);
        for (int i = 0; i < config_.prompt_dim; ++i)
          input.at(y, x, ch++) = cond.prompt[static_cast<std::size_t>(i)];
        input.at(y, x, ch) = t_frac;
      }
    }
    Tensor3 hidden(h, w, config_.hidden);
    conv3x3(input, params_.data() + off_w1_, params_.data() + off_b1_, config_.hidden,
            hidden);
    for (double& v : hidden.data) v = std::tanh(v);
    fwd.inputs.push_back(std::move(input));
    fwd.activated.push_back(std::move(hidden));
  }

  AttentionParams att;
  const int hid = config_.hidden;
  att.query = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>(
      params_.data() + off_q_, hid, hid);
  att.key = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(
      params_.data() + off_k_, hid, hid);
  att.value = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>(
      params_.data() + off_v_, hid, hid);
  fwd.fused = attend_residual(fwd.activated, att, maps_, config_.window);

  fwd.prediction = LatentStack::zeros(static_cast<int>(views), h, w,
                                      config_.latent_channels);
  fwd.prediction.step = t;
  for (std::size_t m = 0; m < views; ++m)
    conv3x3(fwd.fused[m], params_.data() + off_w2_, params_.data() + off_b2_,
            config_.latent_channels, fwd.prediction.views[m]);
  return fwd;
}

LatentStack TinyDenoiser::predict(const LatentStack& noisy, int t,
                                  const std::vector<Condition>& conditions,
                                  const DiffusionSchedule& schedule) const {
  return run_forward(noisy, t, conditions, schedule).prediction;
}

DenoiserFn TinyDenoiser::as_denoiser(const DiffusionSchedule& schedule) const {
  return [this, schedule](const LatentStack& noisy, int t,
                          const std::vector<Condition>& conditions) {
    return predict(noisy, t, conditions, schedule);
  };
}

void TinyDenoiser::run_backward(const Forward& fwd, const LatentStack& d_eps,
                                std::vector<double>& gradients) const {
  const std::size_t views = fwd.inputs.size();
  const int h = fwd.inputs.front().height, w = fwd.inputs.front().width;

  // conv2 backward into the fused features.
  std::vector<Tensor3> d_fused(views, Tensor3(h, w, config_.hidden));
  for (std::size_t m = 0; m < views; ++m)
    conv3x3_backward(fwd.fused[m], d_eps.views[m], params_.data() + off_w2_,
                     gradients.data() + off_w2_, gradients.data() + off_b2_,
                     &d_fused[m]);

  // residual: the attention branch and the skip both receive d_fused.
  AttentionParams att;
  const int hid = config_.hidden;
  att.query = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>(
      params_.data() + off_q_, hid, hid);
  att.key = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(
      params_.data() + off_k_, hid, hid);
  att.value = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>(
      params_.data() + off_v_, hid, hid);
  const AttentionGrads ag =
      mv_attention_backward(fwd.activated, att, maps_, config_.window, d_fused);
  for (int r = 0; r < hid; ++r) {
    for (int c = 0; c < hid; ++c) {
      const std::size_t rc = static_cast<std::size_t>(r) * hid + c;
      gradients[off_q_ + rc] += ag.d_query(r, c);
      gradients[off_k_ + rc] += ag.d_key(r, c);
      gradients[off_v_ + rc] += ag.d_value(r, c);
    }
  }

  for (std::size_t m = 0; m < views; ++m) {
    Tensor3 d_hidden = d_fused[m];
    for (std::size_t i = 0; i < d_hidden.data.size(); ++i)
      d_hidden.data[i] += ag.d_features[m].data[i];
    // tanh backward
    for (std::size_t i = 0; i < d_hidden.data.size(); ++i) {
      const double a = fwd.activated[m].data[i];
      d_hidden.data[i] *= 1.0 - a * a;
    }
    conv3x3_backward(fwd.inputs[m], d_hidden, params_.data() + off_w1_,
                     gradients.data() + off_w1_, gradients.data() + off_b1_, nullptr);
  }
}

double TinyDenoiser::loss_and_gradients(const std::vector<LatentStack>& l0_batch,
                                        const std::vector<std::vector<Condition>>& conditions,
                                        const DiffusionSchedule& schedule,
                                        std::uint64_t seed,
                                        std::vector<double>& gradients) const {
  if (l0_batch.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
  gradients.assign(total_, 0.0);
  double total = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(l0_batch.size());
  for (std::size_t i = 0; i < l0_batch.size(); ++i) {
    const LatentStack& l0 = l0_batch[i];
    const auto& front = l0.views.front();
    const TrainingDraw draw = training_draw(seed, static_cast<int>(i), schedule.steps());
    const NoiseStack noise =
        sample_synced_noise(draw.noise_seed, maps_, static_cast<int>(l0.views.size()),
                            front.height, front.width, front.channels);
    const LatentStack noisy = forward_noise(l0, draw.t, schedule, noise);
    const Forward fwd = run_forward(noisy, draw.t, conditions[i], schedule);

    LatentStack d_eps = fwd.prediction;
    for (std::size_t m = 0; m < l0.views.size(); ++m) {
      for (std::size_t k = 0; k < l0.views[m].data.size(); ++k) {
        const double diff = fwd.prediction.views[m].data[k] - noise.views[m].data[k];
        total += diff * diff;
        d_eps.views[m].data[k] = 2.0 * diff * inv_batch;
      }
    }
    run_backward(fwd, d_eps, gradients);
  }
  const double loss = total * inv_batch;
  if (!std::isfinite(loss)) throw std::domain_error("loss_and_gradients: non-finite loss");
  return loss;
}

std::vector<double> TinyDenoiser::train(const std::vector<LatentStack>& l0_batch,
                                        const std::vector<std::vector<Condition>>& conditions,
                                        const DiffusionSchedule& schedule,
                                        std::uint64_t seed, int steps,
                                        double learning_rate) {
  std::vector<double> m1(total_, 0.0), m2(total_, 0.0), grads;
  std::vector<double> losses;
  losses.reserve(static_cast<std::size_t>(steps));
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  for (int step = 0; step < steps; ++step) {
    losses.push_back(loss_and_gradients(l0_batch, conditions, schedule, seed, grads));
    const double bc1 = 1.0 - std::pow(kBeta1, step + 1);
    const double bc2 = 1.0 - std::pow(kBeta2, step + 1);
    for (std::size_t i = 0; i < total_; ++i) {
      m1[i] = kBeta1 * m1[i] + (1.0 - kBeta1) * grads[i];
      m2[i] = kBeta2 * m2[i] + (1.0 - kBeta2) * grads[i] * grads[i];
      params_[i] -= learning_rate * (m1[i] / bc1) / (std::sqrt(m2[i] / bc2) + kEps);
    }
  }
  return losses;
}

void TinyDenoiser::save(const std::string& path) const {
  TensorDump dump;
  const int ic = in_channels();
  dump["config"] = {{5},
                    {static_cast<double>(config_.latent_channels),
                     static_cast<double>(config_.cond_channels),
                     static_cast<double>(config_.prompt_dim),
                     static_cast<double>(config_.hidden),
                     static_cast<double>(config_.window)}};
  auto slice = [this](std::size_t from, std::size_t to) {
    return std::vector<double>(params_.begin() + static_cast<std::ptrdiff_t>(from),
                               params_.begin() + static_cast<std::ptrdiff_t>(to));
  };
  dump["conv1.weight"] = {{config_.hidden, ic, 3, 3}, slice(off_w1_, off_b1_)};
  dump["conv1.bias"] = {{config_.hidden}, slice(off_b1_, off_q_)};
  dump["attention.query"] = {{config_.hidden, config_.hidden}, slice(off_q_, off_k_)};
  dump["attention.key"] = {{config_.hidden, config_.hidden}, slice(off_k_, off_v_)};
  dump["attention.value"] = {{config_.hidden, config_.hidden}, slice(off_v_, off_w2_)};
  dump["conv2.weight"] = {{config_.latent_channels, config_.hidden, 3, 3},
                          slice(off_w2_, off_b2_)};
  dump["conv2.bias"] = {{config_.latent_channels}, slice(off_b2_, total_)};
  save_tensor_dump(dump, path);
}

TinyDenoiser TinyDenoiser::load(const std::string& path, std::vector<ViewPairMaps> maps) {
  const TensorDump dump = load_tensor_dump(path);
  const auto& cfg = dump.at("config").values;
  Config config;
  config.latent_channels = static_cast<int>(cfg.at(0));
  config.cond_channels = static_cast<int>(cfg.at(1));
  config.prompt_dim = static_cast<int>(cfg.at(2));
  config.hidden = static_cast<int>(cfg.at(3));
  config.window = static_cast<int>(cfg.at(4));
  TinyDenoiser den(config, std::move(maps), 0);
  auto put = [&den](std::size_t at, const std::vector<double>& v) {
    std::copy(v.begin(), v.end(), den.params_.begin() + static_cast<std::ptrdiff_t>(at));
  };
  put(den.off_w1_, dump.at("conv1.weight").values);
  put(den.off_b1_, dump.at("conv1.bias").values);
  put(den.off_q_, dump.at("attention.query").values);
  put(den.off_k_, dump.at("attention.key").values);
  put(den.off_v_, dump.at("attention.value").values);
  put(den.off_w2_, dump.at("conv2.weight").values);
  put(den.off_b2_, dump.at("conv2.bias").values);
  return den;
}

}  // namespace crossview
