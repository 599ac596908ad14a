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

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "movae/augment.hpp"
#include "movae/baselines.hpp"
#include "movae/datasets.hpp"
#include "movae/generalize.hpp"
#include "movae/harness/config.hpp"
#include "movae/harness/record.hpp"
#include "movae/mixture.hpp"

namespace movae {

using Logger = std::function<void(const std::string&)>;

namespace detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

inline std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

inline LabeledDataset head(const LabeledDataset& ds, int limit) {
  if (limit <= 0 || static_cast<std::size_t>(limit) >= ds.size()) return ds;
  std::vector<std::size_t> rows(static_cast<std::size_t>(limit));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return ds.subset(rows);
}

inline Prng repeat_stream(const ExperimentConfig& cfg, int repeat) {
  return Prng(*cfg.seed).split("repeat").split(static_cast<std::uint64_t>(repeat));
}

}  // namespace detail

/// `per_class` random samples of every class (uniform, without replacement).
inline LabeledDataset sample_per_class(const LabeledDataset& ds, std::size_t per_class, const Prng& prng) {
  std::vector<std::size_t> rows;
  for (const auto& [label, idx] : ds.class_index) {
    if (idx.size() < per_class) {
      throw ArgumentError("class " + std::to_string(label) + " has only " + std::to_string(idx.size()) +
                          " samples; " + std::to_string(per_class) + " requested");
    }
    Prng s = prng.split(static_cast<std::uint64_t>(static_cast<std::int64_t>(label)));
    for (auto j : sample_without_replacement(idx.size(), per_class, s)) rows.push_back(idx[j]);
  }
  return ds.subset(rows);
}

/// Training set of every mixture member, in member order.
inline TrainSets class_train_sets(const Mixture& mix, const LabeledDataset& ds) {
  TrainSets sets;
  for (const auto& m : mix.members) sets.push_back(ds.class_images(m.label));
  return sets;
}

/// Inflates each set to `target` rows (originals first) unless the policy is
/// the identity.
inline void augment_sets(TrainSets& sets, const Mixture& mix, const AugmentPolicy& policy, std::size_t target,
                         const Prng& prng) {
  if (policy.is_identity()) return;
  parallel_for(sets.size(), [&](std::size_t i) {
    if (static_cast<std::size_t>(sets[i].rows()) >= target) return;
    Prng s = prng.split(static_cast<std::uint64_t>(static_cast<std::int64_t>(mix.members[i].label)));
    sets[i] = augment_pool(sets[i], policy, target, s);
  });
}

inline MetricsRecord run_supervised(const ExperimentConfig& cfg, const Logger& log = {},
                                    Mixture* final_mixture = nullptr) {
  cfg.validate();
  if (cfg.resolved_protocol() != Protocol::supervised) throw ConfigError("run_supervised: protocol mismatch");
  detail::Stopwatch clock;
  const LabeledDataset train = load_idx(cfg.train_images, cfg.train_labels);
  const LabeledDataset test = detail::head(load_idx(cfg.test_images, cfg.test_labels), cfg.test_limit);
  const double load_s = clock.lap();

  MetricsRecord rec;
  rec.protocol = Protocol::supervised;
  rec.config = config_to_json(cfg);
  for (int r = 0; r < cfg.repeats; ++r) {
    const Prng prng = detail::repeat_stream(cfg, r);
    RepeatRecord rep;
    rep.repeat = r;
    rep.seed = prng.seed();
    rep.seconds["load"] = r == 0 ? load_s : 0.0;
    clock.lap();
    const LabeledDataset data =
        cfg.train_per_class > 0
            ? sample_per_class(train, static_cast<std::size_t>(cfg.train_per_class), prng.split("subset"))
            : train;
    Mixture mix = build_mixture(data.classes(), cfg.vae_config(), prng.split("mixture"), cfg.metric_kind());
    train_mixture(mix, class_train_sets(mix, data), prng.split("train"));
    rep.seconds["train"] = clock.lap();
    rep.accuracy = evaluate_accuracy(mix, test.images, test.labels);
    rep.seconds["evaluate"] = clock.lap();
    rep.train_size = data.size();
    rep.test_size = test.size();
    detail::say(log, "supervised repeat " + std::to_string(r) + ": accuracy " + detail::pct(rep.accuracy));
    rec.repeats.push_back(std::move(rep));
    rec.random_guess = random_guess_accuracy(mix.size());
    if (final_mixture) *final_mixture = std::move(mix);
  }
  return rec;
}

inline MetricsRecord run_semisup(const ExperimentConfig& cfg, const Logger& log = {},
                                 Mixture* final_mixture = nullptr) {
  cfg.validate();
  if (cfg.resolved_protocol() != Protocol::semisup) throw ConfigError("run_semisup: protocol mismatch");
  detail::Stopwatch clock;
  const LabeledDataset train = load_idx(cfg.train_images, cfg.train_labels);
  const LabeledDataset test = detail::head(load_idx(cfg.test_images, cfg.test_labels), cfg.test_limit);
  const double load_s = clock.lap();
  const AugmentPolicy policy = cfg.augment_policy();

  MetricsRecord rec;
  rec.protocol = Protocol::semisup;
  rec.config = config_to_json(cfg);
  for (int r = 0; r < cfg.repeats; ++r) {
    const Prng prng = detail::repeat_stream(cfg, r);
    RepeatRecord rep;
    rep.repeat = r;
    rep.seed = prng.seed();
    rep.seconds["load"] = r == 0 ? load_s : 0.0;
    clock.lap();

    LabeledSplit split = split_labeled_unlabeled(train, static_cast<std::size_t>(cfg.shots), prng.split("split"));
    Mixture mix =
        build_mixture(split.labeled.classes(), cfg.vae_config(), prng.split("mixture"), cfg.metric_kind());
    TrainSets sets = class_train_sets(mix, split.labeled);
    augment_sets(sets, mix, policy, cfg.resolved_pool_size(), prng.split("augment"));
    rep.seconds["augment"] = clock.lap();
    train_mixture(mix, sets, prng.split("train"));
    rep.seconds["train"] = clock.lap();

    auto observer = [&](int it, const SelectionReport& report) {
      std::size_t hits = 0;
      for (std::size_t c = 0; c < report.selected.size(); ++c) {
        for (auto k : report.selected[c]) hits += train.labels[split.pool_rows[k]] == mix.members[c].label;
      }
      const double purity = report.total() ? static_cast<double>(hits) / static_cast<double>(report.total()) : 0.0;
      rep.selection_purity.push_back(purity);
      detail::say(log, "  iteration " + std::to_string(it) + ": selected " + std::to_string(report.total()) +
                           ", purity " + detail::pct(purity) + ", pool left " +
                           std::to_string(split.unlabeled.remaining()));
    };
    rep.trace = run_generalization(mix, split.unlabeled, sets, cfg.generalization(), test.images, test.labels,
                                   prng.split("generalize"), observer);
    rep.seconds["generalize"] = clock.lap();
    rep.accuracy = rep.trace.back().accuracy;
    rep.train_size = split.labeled.size();
    rep.test_size = test.size();
    detail::say(log, "semisup repeat " + std::to_string(r) + ": iteration-0 accuracy " +
                         detail::pct(rep.trace.front().accuracy) + ", final " + detail::pct(rep.accuracy) +
                         " after " + std::to_string(rep.trace.size() - 1) + " iterations");
    rec.repeats.push_back(std::move(rep));
    rec.random_guess = random_guess_accuracy(mix.size());
    if (final_mixture) *final_mixture = std::move(mix);
  }
  return rec;
}

inline LabeledDataset load_episodic_dataset(const ExperimentConfig& cfg) {
  if (!cfg.omniglot_dir.empty()) return load_pgm_tree(cfg.omniglot_dir);
  return load_idx(cfg.train_images, cfg.train_labels);
}

inline MetricsRecord run_oneshot(const ExperimentConfig& cfg, const Logger& log = {},
                                 Mixture* final_mixture = nullptr) {
  cfg.validate();
  if (cfg.resolved_protocol() != Protocol::oneshot) throw ConfigError("run_oneshot: protocol mismatch");
  detail::Stopwatch clock;
  const LabeledDataset ds = load_episodic_dataset(cfg);
  const double load_s = clock.lap();
  const AugmentPolicy policy = cfg.augment_policy();
  const EpisodeSpec spec = cfg.episode();

  MetricsRecord rec;
  rec.protocol = Protocol::oneshot;
  rec.config = config_to_json(cfg);
  rec.random_guess = random_guess_accuracy(spec.n_way);
  for (int r = 0; r < cfg.repeats; ++r) {
    const Prng prng = detail::repeat_stream(cfg, r);
    RepeatRecord rep;
    rep.repeat = r;
    rep.seed = prng.seed();
    rep.seconds["load"] = r == 0 ? load_s : 0.0;
    clock.lap();

    const Episode ep = sample_episode(ds, spec, prng.split("episode"));
    Mixture mix = build_mixture(ep.train.classes(), cfg.vae_config(), prng.split("mixture"), cfg.metric_kind());
    TrainSets sets = class_train_sets(mix, ep.train);
    augment_sets(sets, mix, policy, cfg.resolved_pool_size(), prng.split("augment"));
    rep.seconds["augment"] = clock.lap();
    train_mixture(mix, sets, prng.split("train"));
    rep.seconds["train"] = clock.lap();
    rep.accuracy = evaluate_accuracy(mix, ep.test.images, ep.test.labels);
    rep.seconds["evaluate"] = clock.lap();

    // kNN sees exactly the (augmented) data the mixture was trained on.
    Tensorf knn_images(0, 0);
    std::vector<Label> knn_labels;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      append_rows(knn_images, sets[i]);
      knn_labels.insert(knn_labels.end(), static_cast<std::size_t>(sets[i].rows()), mix.members[i].label);
    }
    const LabeledDataset knn_train(std::move(knn_images), std::move(knn_labels));
    rep.knn_accuracy = knn_accuracy(knn_train, ep.test, static_cast<std::size_t>(cfg.knn_k));
    rep.seconds["knn"] = clock.lap();
    rep.train_size = ep.train.size();
    rep.test_size = ep.test.size();
    detail::say(log, "oneshot episode " + std::to_string(r) + ": MoVAE " + detail::pct(rep.accuracy) + ", kNN " +
                         detail::pct(*rep.knn_accuracy));
    rec.repeats.push_back(std::move(rep));
    if (final_mixture) *final_mixture = std::move(mix);
  }
  return rec;
}

inline MetricsRecord run_experiment(const ExperimentConfig& cfg, const Logger& log = {},
                                    Mixture* final_mixture = nullptr) {
  switch (cfg.resolved_protocol()) {
    case Protocol::supervised: return run_supervised(cfg, log, final_mixture);
    case Protocol::semisup: return run_semisup(cfg, log, final_mixture);
    case Protocol::oneshot: return run_oneshot(cfg, log, final_mixture);
  }
  throw ConfigError("unknown protocol");
}

}  // namespace movae
