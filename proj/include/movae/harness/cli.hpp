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

#include <string>

#include <CLI11.hpp>

#include "movae/harness/config.hpp"

namespace movae {

/// Registers the experiment flags on `app`. Each flag may also appear as a
/// `name = value` line in the file passed to --config; flags win.
inline void bind_experiment_options(CLI::App& app, ExperimentConfig& cfg, bool with_protocol) {
  app.set_config("--config", "", "Flat key=value configuration file");
  if (with_protocol) {
    app.add_option_function<std::string>(
           "--protocol", [&cfg](const std::string& s) { cfg.protocol = parse_protocol(s); },
           "supervised | semisup | oneshot")
        ->required();
  }
  app.add_option("--train-images", cfg.train_images, "IDX training images");
  app.add_option("--train-labels", cfg.train_labels, "IDX training labels");
  app.add_option("--test-images", cfg.test_images, "IDX test images");
  app.add_option("--test-labels", cfg.test_labels, "IDX test labels");
  app.add_option("--omniglot-dir", cfg.omniglot_dir, "PGM tree <root>/<class>/<sample>.pgm");
  app.add_option("--shots", cfg.shots, "Labeled samples per class");
  app.add_option("--ways", cfg.ways, "Classes per episode (oneshot)");
  app.add_option("--test-per-class", cfg.test_per_class, "Episode test samples per class (default 20 - shots)");
  app.add_option("--psi", cfg.psi, "Unlabeled samples consumed per generalization iteration");
  app.add_option("--iterations", cfg.iterations, "Generalization iterations (default: until pool exhausted)");
  app.add_option("--augment", cfg.augment, "none | mnist | fashion | omniglot");
  app.add_option("--pool-size", cfg.pool_size, "Augmented images per class");
  app.add_option("--metric", cfg.metric, "pcc | rmse")->check(CLI::IsMember({"pcc", "rmse"}));
  app.add_option("--seed", cfg.seed, "Master seed (mandatory)");
  app.add_option("--repeats", cfg.repeats, "Independent repeats / episodes");
  app.add_option("--epochs", cfg.epochs, "Training epochs per (re)training phase");
  app.add_option("--retrain-epochs", cfg.retrain_epochs, "Epochs per generalization retrain");
  app.add_option("--hidden-dim", cfg.hidden_dim, "VAE intermediate width");
  app.add_option("--latent-dim", cfg.latent_dim, "VAE latent width");
  app.add_option("--batch-size", cfg.batch_size, "Mini-batch upper bound");
  app.add_option("--learning-rate", cfg.learning_rate, "RMSProp learning rate");
  app.add_flag("--cold-restart", cfg.cold_restart, "Re-initialize members before each retrain");
  app.add_option("--train-per-class", cfg.train_per_class, "Supervised: random samples per class (0 = all)");
  app.add_option("--test-limit", cfg.test_limit, "Evaluate on the first N test images (0 = all)");
  app.add_option("--knn-k", cfg.knn_k, "Neighbours for the kNN baseline");
  app.add_option("--out", cfg.out, "Metrics JSON output path");
  app.add_option("--trace", cfg.trace, "Per-iteration CSV trace path");
  app.add_option("--checkpoint", cfg.checkpoint, "Save the final mixture here");
}

}  // namespace movae
