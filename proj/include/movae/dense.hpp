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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "movae/error.hpp"
#include "movae/prng.hpp"
#include "movae/tensor.hpp"

namespace movae {

enum class Activation { relu, sigmoid, linear };

template <class T>
struct DenseLayer {
  Tensor<T> weights;  // fan_in x fan_out
  Tensor<T> bias;     // 1 x fan_out
  Activation activation = Activation::linear;

  DenseLayer() = default;
  DenseLayer(Tensor<T> w, Tensor<T> b, Activation act)
      : weights(std::move(w)), bias(std::move(b)), activation(act) {
    if (bias.rows() != 1 || bias.cols() != weights.cols()) {
      throw DimensionError("dense layer bias shape " + shape_string(bias.rows(), bias.cols()) +
                           " does not match weights " +
                           shape_string(weights.rows(), weights.cols()));
    }
  }

  Eigen::Index fan_in() const { return weights.rows(); }
  Eigen::Index fan_out() const { return weights.cols(); }
  std::size_t parameter_count() const {
    return static_cast<std::size_t>(weights.size() + bias.size());
  }

  template <class U>
  DenseLayer<U> cast() const {
    return DenseLayer<U>(weights.template cast<U>(), bias.template cast<U>(), activation);
  }
};

template <class T>
struct LayerCache {
  Tensor<T> input;
  Tensor<T> pre_activation;
};

template <class T>
struct LayerGradient {
  Tensor<T> weights;
  Tensor<T> bias;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)).
template <class T = float>
Tensor<T> init_glorot(Eigen::Index fan_in, Eigen::Index fan_out, Prng& prng) {
  if (fan_in < 1 || fan_out < 1) throw ArgumentError("init_glorot: fan_in and fan_out must be >= 1");
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor<T> w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w.data()[i] = static_cast<T>(prng.uniform(-limit, limit));
  }
  return w;
}

template <class T = float>
DenseLayer<T> make_dense(Eigen::Index fan_in, Eigen::Index fan_out, Activation act, Prng& prng) {
  return DenseLayer<T>(init_glorot<T>(fan_in, fan_out, prng), Tensor<T>::Zero(1, fan_out), act);
}

template <class T>
T sigmoid(T a) {
  return T(1) / (T(1) + std::exp(-a));
}

template <class T>
Tensor<T> activate(const Tensor<T>& pre, Activation act) {
  switch (act) {
    case Activation::relu: return pre.cwiseMax(T(0));
    case Activation::sigmoid: return pre.unaryExpr([](T a) { return sigmoid(a); });
    case Activation::linear: return pre;
  }
  return pre;
}

/// Elementwise derivative of the activation, evaluated at the pre-activation.
template <class T>
Tensor<T> activation_derivative(const Tensor<T>& pre, Activation act) {
  switch (act) {
    case Activation::relu:
      return pre.unaryExpr([](T a) { return a > T(0) ? T(1) : T(0); });
    case Activation::sigmoid:
      return pre.unaryExpr([](T a) {
        const T s = sigmoid(a);
        return s * (T(1) - s);
      });
    case Activation::linear: return Tensor<T>::Ones(pre.rows(), pre.cols());
  }
  return Tensor<T>::Ones(pre.rows(), pre.cols());
}

template <class T>
Tensor<T> layer_forward(const DenseLayer<T>& layer, const Tensor<T>& input, LayerCache<T>* cache) {
  require_width(input, layer.fan_in(), "dense forward input");
  Tensor<T> pre(input.rows(), layer.fan_out());
  pre.noalias() = input * layer.weights;
  pre.rowwise() += layer.bias.row(0);
  Tensor<T> out = activate(pre, layer.activation);
  if (cache) {
    cache->input = input;
    cache->pre_activation = std::move(pre);
  }
  return out;
}

/// Backward step given the gradient with respect to the pre-activation.
/// Returns the gradient with respect to the layer input.
template <class T>
Tensor<T> layer_backward_pre(const DenseLayer<T>& layer, const LayerCache<T>& cache,
                             const Tensor<T>& pre_gradient, LayerGradient<T>& grad,
                             bool need_input_gradient = true) {
  require_same_shape(pre_gradient, cache.pre_activation, "dense backward gradient");
  grad.weights.resize(layer.fan_in(), layer.fan_out());
  grad.weights.noalias() = cache.input.transpose() * pre_gradient;
  grad.bias = pre_gradient.colwise().sum();
  if (!need_input_gradient) return Tensor<T>();
  Tensor<T> input_grad(pre_gradient.rows(), layer.fan_in());
  input_grad.noalias() = pre_gradient * layer.weights.transpose();
  return input_grad;
}

template <class T>
Tensor<T> layer_backward(const DenseLayer<T>& layer, const LayerCache<T>& cache,
                         const Tensor<T>& output_gradient, LayerGradient<T>& grad,
                         bool need_input_gradient = true) {
  require_same_shape(output_gradient, cache.pre_activation, "dense backward gradient");
  if (layer.activation == Activation::linear) {
    return layer_backward_pre(layer, cache, output_gradient, grad, need_input_gradient);
  }
  const Tensor<T> pre_grad =
      output_gradient.cwiseProduct(activation_derivative(cache.pre_activation, layer.activation));
  return layer_backward_pre(layer, cache, pre_grad, grad, need_input_gradient);
}

template <class T>
struct ForwardResult {
  Tensor<T> output;
  std::vector<LayerCache<T>> caches;
};

template <class T>
struct BackwardResult {
  std::vector<LayerGradient<T>> parameter_gradients;
  Tensor<T> input_gradient;
};

template <class T>
ForwardResult<T> forward_pass(std::span<const DenseLayer<T>> network, const Tensor<T>& input) {
  if (network.empty()) throw ArgumentError("forward_pass: empty network");
  ForwardResult<T> result;
  result.caches.resize(network.size());
  Tensor<T> x = input;
  for (std::size_t i = 0; i < network.size(); ++i) {
    x = layer_forward(network[i], x, &result.caches[i]);
  }
  result.output = std::move(x);
  return result;
}

template <class T>
BackwardResult<T> backward_pass(std::span<const DenseLayer<T>> network,
                                std::span<const LayerCache<T>> caches,
                                const Tensor<T>& output_gradient) {
  if (caches.size() != network.size()) {
    throw DimensionError("backward_pass: " + std::to_string(caches.size()) + " caches for " +
                         std::to_string(network.size()) + " layers");
  }
  BackwardResult<T> result;
  result.parameter_gradients.resize(network.size());
  Tensor<T> g = output_gradient;
  for (std::size_t i = network.size(); i-- > 0;) {
    g = layer_backward(network[i], caches[i], g, result.parameter_gradients[i]);
  }
  result.input_gradient = std::move(g);
  return result;
}

}  // namespace movae
