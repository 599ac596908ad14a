// Copyright 2026 The MoVAE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "movae/dense.hpp"
#include "movae/error.hpp"
#include "movae/prng.hpp"
#include "movae/rmsprop.hpp"
#include "movae/tensor.hpp"

namespace movae {

struct VaeConfig {
  int input_dim = 784;
  int hidden_dim = 256;
  int latent_dim = 50;
  int epochs = 40;
  /// Upper bound; sets smaller than this train full-batch.
  int batch_size = 128;
  RmsPropConfig optimizer;

  static VaeConfig mnist() { return VaeConfig{}; }
  static VaeConfig omniglot() {
    VaeConfig c;
    c.hidden_dim = 784;
    c.latent_dim = 100;
    c.epochs = 50;
    return c;
  }

  void validate() const {
    if (input_dim < 1 || hidden_dim < 1 || latent_dim < 1) {
      throw ConfigError("vae: all layer dimensions must be >= 1");
    }
    if (epochs < 1) throw ConfigError("vae: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("vae: batch_size must be >= 1");
    optimizer.validate();
  }

  Eigen::Index effective_batch(Eigen::Index n) const {
    return std::min<Eigen::Index>(batch_size, n);
  }
};

inline bool operator==(const VaeConfig& a, const VaeConfig& b) {
  return a.input_dim == b.input_dim && a.hidden_dim == b.hidden_dim &&
         a.latent_dim == b.latent_dim;
}

/// Encoder (phi): input -> relu hidden -> (mu, logvar).
/// Decoder (theta): z -> relu hidden -> sigmoid reconstruction.
template <class T>
struct VaeModel {
  DenseLayer<T> encoder_hidden;
  DenseLayer<T> mu_head;
  DenseLayer<T> logvar_head;
  DenseLayer<T> decoder_hidden;
  DenseLayer<T> decoder_out;

  static VaeModel init(const VaeConfig& config, Prng& prng) {
    config.validate();
    VaeModel m;
    m.encoder_hidden = make_dense<T>(config.input_dim, config.hidden_dim, Activation::relu, prng);
    m.mu_head = make_dense<T>(config.hidden_dim, config.latent_dim, Activation::linear, prng);
    m.logvar_head = make_dense<T>(config.hidden_dim, config.latent_dim, Activation::linear, prng);
    m.decoder_hidden = make_dense<T>(config.latent_dim, config.hidden_dim, Activation::relu, prng);
    m.decoder_out = make_dense<T>(config.hidden_dim, config.input_dim, Activation::sigmoid, prng);
    return m;
  }

  Eigen::Index input_dim() const { return encoder_hidden.fan_in(); }
  Eigen::Index latent_dim() const { return mu_head.fan_out(); }
  Eigen::Index hidden_dim() const { return encoder_hidden.fan_out(); }

  /// Declaration order: encoder_hidden, mu_head, logvar_head, decoder_hidden, decoder_out.
  std::vector<DenseLayer<T>*> layers() {
    return {&encoder_hidden, &mu_head, &logvar_head, &decoder_hidden, &decoder_out};
  }
  std::vector<const DenseLayer<T>*> layers() const {
    return {&encoder_hidden, &mu_head, &logvar_head, &decoder_hidden, &decoder_out};
  }

  /// Weights then bias for each layer, in declaration order.
  ParameterRefs<T> parameters() {
    ParameterRefs<T> out;
    for (auto* l : layers()) {
      out.emplace_back(l->weights);
      out.emplace_back(l->bias);
    }
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto* l : layers()) n += l->parameter_count();
    return n;
  }

  template <class U>
  VaeModel<U> cast() const {
    VaeModel<U> m;
    m.encoder_hidden = encoder_hidden.template cast<U>();
    m.mu_head = mu_head.template cast<U>();
    m.logvar_head = logvar_head.template cast<U>();
    m.decoder_hidden = decoder_hidden.template cast<U>();
    m.decoder_out = decoder_out.template cast<U>();
    return m;
  }
};

template <class T>
struct Encoded {
  Tensor<T> mu;
  Tensor<T> logvar;
};

struct LossBreakdown {
  double reconstruction = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

namespace detail {

template <class T>
void check_unit_interval(const Tensor<T>& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const T v = x.data()[i];
    if (!(v >= T(0) && v <= T(1))) {
      throw DomainError("input value " + std::to_string(static_cast<double>(v)) +
                        " at element " + std::to_string(i) + " is outside [0, 1]");
    }
  }
}

inline constexpr double kBceClamp = 1e-7;

template <class T>
LossBreakdown loss_unchecked(const Tensor<T>& x, const Tensor<T>& xhat, const Tensor<T>& mu,
                             const Tensor<T>& logvar) {
  const double lo = kBceClamp;
  const double hi = 1.0 - kBceClamp;
  double rec = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(x.data()[i]);
    const double p = std::clamp(static_cast<double>(xhat.data()[i]), lo, hi);
    rec -= t * std::log(p) + (1.0 - t) * std::log1p(-p);
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double m = static_cast<double>(mu.data()[i]);
    const double lv = static_cast<double>(logvar.data()[i]);
    kl += -0.5 * (1.0 + lv - m * m - std::exp(lv));
  }
  const double batch = static_cast<double>(x.rows());
  LossBreakdown out;
  out.reconstruction = rec / batch;
  // Each term of the sum is >= 0 analytically; rounding can leave -1e-17.
  out.kl = std::max(0.0, kl / batch);
  out.total = out.reconstruction + out.kl;
  return out;
}

}  // namespace detail

template <class T>
Encoded<T> encode(const VaeModel<T>& model, const Tensor<T>& x) {
  require_width(x, model.input_dim(), "encode");
  const Tensor<T> h = layer_forward(model.encoder_hidden, x, static_cast<LayerCache<T>*>(nullptr));
  return {layer_forward(model.mu_head, h, static_cast<LayerCache<T>*>(nullptr)),
          layer_forward(model.logvar_head, h, static_cast<LayerCache<T>*>(nullptr))};
}

template <class T>
Tensor<T> reparameterize(const Tensor<T>& mu, const Tensor<T>& logvar, const Tensor<T>& eps) {
  require_same_shape(mu, logvar, "reparameterize logvar");
  require_same_shape(mu, eps, "reparameterize eps");
  return mu.array() + (T(0.5) * logvar.array()).exp() * eps.array();
}

template <class T>
Tensor<T> decode(const VaeModel<T>& model, const Tensor<T>& z) {
  require_width(z, model.latent_dim(), "decode");
  const Tensor<T> h = layer_forward(model.decoder_hidden, z, static_cast<LayerCache<T>*>(nullptr));
  return layer_forward(model.decoder_out, h, static_cast<LayerCache<T>*>(nullptr));
}

/// Deterministic reconstruction through the posterior mean (eps = 0).
template <class T>
Tensor<T> reconstruct(const VaeModel<T>& model, const Tensor<T>& x) {
  require_width(x, model.input_dim(), "reconstruct");
  const Tensor<T> h = layer_forward(model.encoder_hidden, x, static_cast<LayerCache<T>*>(nullptr));
  return decode(model, layer_forward(model.mu_head, h, static_cast<LayerCache<T>*>(nullptr)));
}

/// Summed-over-pixels binary cross-entropy plus analytic KL to N(0, I), both
/// averaged over the batch. This is the negated variational lower bound.
template <class T>
LossBreakdown vae_loss(const Tensor<T>& x, const Tensor<T>& xhat, const Tensor<T>& mu,
                       const Tensor<T>& logvar) {
  require_same_shape(x, xhat, "vae_loss reconstruction");
  require_same_shape(mu, logvar, "vae_loss latent");
  if (mu.rows() != x.rows()) throw DimensionError("vae_loss: latent batch differs from input batch");
  detail::check_unit_interval(x);
  return detail::loss_unchecked(x, xhat, mu, logvar);
}

template <class T>
struct LossAndGradients {
  LossBreakdown loss;
  /// Same order as VaeModel::parameters().
  std::vector<Tensor<T>> gradients;
};

/// Loss and its exact gradient for a fixed noise sample eps (batch x latent).
template <class T>
LossAndGradients<T> loss_and_gradients(const VaeModel<T>& model, const Tensor<T>& x,
                                       const Tensor<T>& eps) {
  require_width(x, model.input_dim(), "loss_and_gradients");
  if (eps.rows() != x.rows() || eps.cols() != model.latent_dim()) {
    throw DimensionError("loss_and_gradients: eps shape " + shape_string(eps.rows(), eps.cols()));
  }
  LayerCache<T> c_enc, c_mu, c_lv, c_dec, c_out;
  const Tensor<T> h1 = layer_forward(model.encoder_hidden, x, &c_enc);
  const Tensor<T> mu = layer_forward(model.mu_head, h1, &c_mu);
  const Tensor<T> logvar = layer_forward(model.logvar_head, h1, &c_lv);
  const Tensor<T> sigma = (T(0.5) * logvar.array()).exp();
  const Tensor<T> z = mu.array() + sigma.array() * eps.array();
  const Tensor<T> h2 = layer_forward(model.decoder_hidden, z, &c_dec);
  const Tensor<T> xhat = layer_forward(model.decoder_out, h2, &c_out);

  LossAndGradients<T> out;
  out.loss = detail::loss_unchecked(x, xhat, mu, logvar);

  const T inv_batch = T(1) / static_cast<T>(x.rows());
  const T lo = static_cast<T>(detail::kBceClamp);
  const T hi = static_cast<T>(1.0 - detail::kBceClamp);
  // d(BCE)/d(logit) = xhat - x inside the clamp window; zero where clamped.
  Tensor<T> d_logits(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const T p = xhat.data()[i];
    d_logits.data()[i] = (p >= lo && p <= hi) ? (p - x.data()[i]) * inv_batch : T(0);
  }

  std::vector<LayerGradient<T>> g(5);
  const Tensor<T> d_h2 = layer_backward_pre(model.decoder_out, c_out, d_logits, g[4]);
  const Tensor<T> d_z = layer_backward(model.decoder_hidden, c_dec, d_h2, g[3]);
  const Tensor<T> d_mu = d_z + mu * inv_batch;
  const Tensor<T> d_logvar =
      T(0.5) * (d_z.array() * eps.array() * sigma.array() +
                (sigma.array().square() - T(1)) * inv_batch);
  Tensor<T> d_h1 = layer_backward_pre(model.mu_head, c_mu, d_mu, g[1]);
  d_h1 += layer_backward_pre(model.logvar_head, c_lv, d_logvar, g[2]);
  layer_backward(model.encoder_hidden, c_enc, d_h1, g[0], /*need_input_gradient=*/false);

  out.gradients.reserve(10);
  for (auto& lg : g) {
    out.gradients.push_back(std::move(lg.weights));
    out.gradients.push_back(std::move(lg.bias));
  }
  return out;
}

/// Shuffled mini-batch RMSProp over `config.epochs` epochs, one fresh noise
/// sample per datum per step. Returns the mean total loss of each epoch.
template <class T>
std::vector<double> train_epochs(VaeModel<T>& model, const Tensor<T>& data, const VaeConfig& config,
                                 RmsPropState<T>& optimizer, Prng& prng) {
  if (data.rows() == 0) throw ArgumentError("train_epochs: empty training data");
  config.validate();
  require_width(data, model.input_dim(), "train_epochs");
  detail::check_unit_interval(data);

  const Eigen::Index n = data.rows();
  const Eigen::Index batch = config.effective_batch(n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  auto params = model.parameters();
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(config.epochs));
  Tensor<T> xb, eps;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(std::span<Eigen::Index>(order), prng);
    double sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index rows = std::min(batch, n - start);
      xb.resize(rows, data.cols());
      for (Eigen::Index r = 0; r < rows; ++r) xb.row(r) = data.row(order[static_cast<std::size_t>(start + r)]);
      eps.resize(rows, model.latent_dim());
      for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = static_cast<T>(prng.normal());
      auto lg = loss_and_gradients(model, xb, eps);
      if (!std::isfinite(lg.loss.total)) {
        throw NumericalError("non-finite loss in epoch " + std::to_string(epoch));
      }
      rmsprop_step(params, std::span<const Tensor<T>>(lg.gradients), optimizer);
      sum += lg.loss.total * static_cast<double>(rows);
    }
    history.push_back(sum / static_cast<double>(n));
  }
  return history;
}

}  // namespace movae
