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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "movae/error.hpp"
#include "movae/tensor.hpp"

namespace movae {

struct RmsPropConfig {
  double learning_rate = 0.001;
  double rho = 0.9;
  double epsilon = 1e-7;

  void validate() const {
    if (!(learning_rate > 0) || !(rho > 0 && rho < 1) || !(epsilon > 0)) {
      throw ConfigError("rmsprop: learning_rate > 0, 0 < rho < 1 and epsilon > 0 required");
    }
  }
};

/// Running mean of squared gradients, one cache tensor per parameter tensor.
/// The cache is lazily shaped on the first step.
template <class T>
struct RmsPropState {
  RmsPropConfig config;
  std::vector<Tensor<T>> cache;

  RmsPropState() = default;
  explicit RmsPropState(RmsPropConfig c) : config(c) { config.validate(); }

  void reset() { cache.clear(); }
};

template <class T>
using ParameterRefs = std::vector<std::reference_wrapper<Tensor<T>>>;

/// cache <- rho * cache + (1 - rho) * g^2;  p <- p - lr * g / (sqrt(cache) + eps)
template <class T>
void rmsprop_step(const ParameterRefs<T>& params, std::span<const Tensor<T>> grads,
                  RmsPropState<T>& state) {
  if (params.size() != grads.size()) {
    throw DimensionError("rmsprop_step: " + std::to_string(params.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    require_same_shape(params[i].get(), grads[i], "rmsprop_step");
    const T* g = grads[i].data();
    for (Eigen::Index k = 0; k < grads[i].size(); ++k) {
      if (!std::isfinite(g[k])) {
        throw NumericalError("non-finite gradient in parameter " + std::to_string(i) +
                             " at element " + std::to_string(k));
      }
    }
  }
  if (state.cache.empty()) {
    state.cache.reserve(params.size());
    for (const auto& p : params) state.cache.push_back(Tensor<T>::Zero(p.get().rows(), p.get().cols()));
  } else if (state.cache.size() != params.size()) {
    throw DimensionError("rmsprop_step: optimizer state tracks " +
                         std::to_string(state.cache.size()) + " parameters");
  }
  const T lr = static_cast<T>(state.config.learning_rate);
  const T rho = static_cast<T>(state.config.rho);
  const T eps = static_cast<T>(state.config.epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& c = state.cache[i];
    require_same_shape(c, grads[i], "rmsprop_step cache");
    c = rho * c.array() + (T(1) - rho) * grads[i].array().square();
    params[i].get().array() -= lr * grads[i].array() / (c.array().sqrt() + eps);
  }
}

}  // namespace movae
