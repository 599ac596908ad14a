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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "movae/augment.hpp"
#include "movae/datasets.hpp"
#include "movae/error.hpp"
#include "movae/generalize.hpp"
#include "movae/metrics.hpp"
#include "movae/vae.hpp"

namespace movae {

enum class Protocol { supervised, semisup, oneshot };

inline std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::supervised: return "supervised";
    case Protocol::semisup: return "semisup";
    case Protocol::oneshot: return "oneshot";
  }
  return "unknown";
}

inline Protocol parse_protocol(std::string_view s) {
  if (s == "supervised") return Protocol::supervised;
  if (s == "semisup") return Protocol::semisup;
  if (s == "oneshot") return Protocol::oneshot;
  throw ConfigError("unknown protocol '" + std::string(s) + "' (expected supervised, semisup, oneshot)");
}

/// Everything a run needs. Unset optionals take protocol defaults; see the
/// resolved_* accessors.
struct ExperimentConfig {
  std::optional<Protocol> protocol;
  std::string train_images, train_labels, test_images, test_labels;
  std::string omniglot_dir;

  int shots = 1;
  int ways = 5;
  std::optional<int> test_per_class;
  int psi = 3000;
  std::optional<int> iterations;  // unset: until the pool is exhausted
  std::optional<std::string> augment;
  std::optional<int> pool_size;
  std::string metric = "pcc";
  std::optional<std::uint64_t> seed;
  int repeats = 1;

  std::optional<int> epochs;
  std::optional<int> retrain_epochs;
  std::optional<int> hidden_dim;
  std::optional<int> latent_dim;
  int batch_size = 128;
  double learning_rate = 0.001;
  bool cold_restart = false;

  /// Supervised: labeled samples per class drawn from the training set (0 = all).
  int train_per_class = 0;
  /// Evaluate on the first N test images only (0 = all).
  int test_limit = 0;
  int knn_k = 3;

  std::string out;
  std::string trace;
  std::string checkpoint;

  bool omniglot_family() const { return resolved_protocol() == Protocol::oneshot && !omniglot_dir.empty(); }

  Protocol resolved_protocol() const {
    if (!protocol) throw ConfigError("protocol is not set");
    return *protocol;
  }

  VaeConfig vae_config() const {
    VaeConfig c = omniglot_family() ? VaeConfig::omniglot() : VaeConfig::mnist();
    if (epochs) c.epochs = *epochs;
    if (hidden_dim) c.hidden_dim = *hidden_dim;
    if (latent_dim) c.latent_dim = *latent_dim;
    c.batch_size = batch_size;
    c.optimizer.learning_rate = learning_rate;
    return c;
  }

  AugmentPolicy augment_policy() const {
    if (augment) return AugmentPolicy::named(*augment);
    return resolved_protocol() == Protocol::oneshot ? AugmentPolicy::omniglot() : AugmentPolicy::none();
  }

  std::size_t resolved_pool_size() const {
    if (pool_size) return static_cast<std::size_t>(*pool_size);
    return resolved_protocol() == Protocol::oneshot ? 10000 : 500;
  }

  GeneralizationConfig generalization() const {
    GeneralizationConfig g;
    g.psi = psi;
    g.max_iterations = iterations;
    g.retrain_epochs = retrain_epochs;
    g.cold_restart = cold_restart;
    return g;
  }

  EpisodeSpec episode() const {
    EpisodeSpec e;
    e.n_way = static_cast<std::size_t>(ways);
    e.k_shot = static_cast<std::size_t>(shots);
    e.test_per_class = static_cast<std::size_t>(test_per_class.value_or(std::max(1, 20 - shots)));
    return e;
  }

  MetricKind metric_kind() const { return parse_metric(metric); }

  /// Checks every field before any data is touched.
  void validate() const {
    const Protocol p = resolved_protocol();
    if (!seed) throw ConfigError("seed is mandatory");
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    if (shots < 1) throw ConfigError("shots must be >= 1");
    if (test_limit < 0) throw ConfigError("test-limit must be >= 0");
    if (train_per_class < 0) throw ConfigError("train-per-class must be >= 0");
    if (knn_k < 1) throw ConfigError("knn-k must be >= 1");
    if (pool_size && *pool_size < shots) throw ConfigError("pool-size must be >= shots");
    if (iterations && *iterations < 0) throw ConfigError("iterations must be >= 0");
    if (test_per_class && *test_per_class < 1) throw ConfigError("test-per-class must be >= 1");
    (void)metric_kind();
    augment_policy().validate();
    vae_config().validate();
    auto need = [](const std::string& v, const char* name) {
      if (v.empty()) throw ConfigError(std::string(name) + " is required for this protocol");
    };
    switch (p) {
      case Protocol::supervised:
      case Protocol::semisup:
        need(train_images, "train-images");
        need(train_labels, "train-labels");
        need(test_images, "test-images");
        need(test_labels, "test-labels");
        if (p == Protocol::semisup) {
          if (psi < 1) throw ConfigError("psi must be >= 1");
          if (retrain_epochs && *retrain_epochs < 1) throw ConfigError("retrain-epochs must be >= 1");
        }
        break;
      case Protocol::oneshot:
        if (omniglot_dir.empty() && (train_images.empty() || train_labels.empty())) {
          throw ConfigError("oneshot needs omniglot-dir or train-images/train-labels");
        }
        episode().validate();
        break;
    }
  }
};

}  // namespace movae
