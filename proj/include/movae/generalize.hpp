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
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "movae/error.hpp"
#include "movae/metrics.hpp"
#include "movae/mixture.hpp"
#include "movae/pool.hpp"
#include "movae/prng.hpp"

namespace movae {

struct GeneralizationConfig {
  /// Unlabeled samples consumed per iteration; each class may claim psi / |C|.
  int psi = 3000;
  /// nullopt runs until the pool is exhausted.
  std::optional<int> max_iterations;
  /// nullopt uses the mixture's VaeConfig::epochs.
  std::optional<int> retrain_epochs;
  /// Re-initialize members before retraining instead of continuing.
  bool cold_restart = false;

  void validate(std::size_t classes) const {
    if (psi < static_cast<int>(classes)) {
      throw ConfigError("psi (" + std::to_string(psi) + ") must be >= number of classes (" +
                        std::to_string(classes) + ")");
    }
    if (max_iterations && *max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
    if (retrain_epochs && *retrain_epochs < 1) throw ConfigError("retrain_epochs must be >= 1");
  }
};

/// selected[c] holds row indices claimed by column c, in acceptance order;
/// skipped[c] counts candidates rejected by the exclusion rule.
struct SelectionReport {
  std::vector<std::vector<std::size_t>> selected;
  std::vector<std::size_t> skipped;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& s : selected) n += s.size();
    return n;
  }
};

/// Row indices sorted by ascending distance in `column` (ties: lower row first).
inline std::vector<std::size_t> sorted_candidates(const DistanceMatrix& dist, Eigen::Index column) {
  std::vector<std::size_t> order(static_cast<std::size_t>(dist.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist(static_cast<Eigen::Index>(a), column) < dist(static_cast<Eigen::Index>(b), column);
  });
  return order;
}

/// Quota selection with exclusion. Each class, in `class_order`, walks its
/// candidates from best to worst reconstructed and accepts a candidate unless
/// it was already claimed this round or it is among the psi best-reconstructed
/// candidates of some other class. Rankings and top-psi sets are fixed from
/// `dist` at entry. Stops at floor(psi / |C|) acceptances per class.
inline SelectionReport select_samples(const DistanceMatrix& dist, int psi,
                                      std::span<const std::size_t> class_order) {
  const auto n = static_cast<std::size_t>(dist.rows());
  const auto classes = static_cast<std::size_t>(dist.cols());
  SelectionReport report;
  report.selected.assign(classes, {});
  report.skipped.assign(classes, 0);
  if (n == 0 || classes == 0 || psi <= 0) return report;

  const std::size_t quota = static_cast<std::size_t>(psi) / classes;
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(psi), n);

  std::vector<std::vector<std::size_t>> ranked(classes);
  // top_count[k]: in how many classes' top-psi row k sits; in_top[c][k] flags it.
  std::vector<std::vector<char>> in_top(classes, std::vector<char>(n, 0));
  std::vector<std::size_t> top_count(n, 0);
  for (std::size_t c = 0; c < classes; ++c) {
    ranked[c] = sorted_candidates(dist, static_cast<Eigen::Index>(c));
    for (std::size_t r = 0; r < top; ++r) {
      in_top[c][ranked[c][r]] = 1;
      ++top_count[ranked[c][r]];
    }
  }

  std::vector<char> claimed(n, 0);
  for (std::size_t c : class_order) {
    if (c >= classes) throw ArgumentError("select_samples: class index out of range");
    auto& chosen = report.selected[c];
    for (std::size_t k : ranked[c]) {
      if (chosen.size() >= quota) break;
      if (claimed[k]) continue;
      if (top_count[k] - static_cast<std::size_t>(in_top[c][k]) > 0) {
        ++report.skipped[c];
        continue;
      }
      claimed[k] = 1;
      chosen.push_back(k);
    }
  }
  return report;
}

/// Per-class training sets, parallel to Mixture::members.
using TrainSets = std::vector<Tensorf>;

/// One round: score the unconsumed pool once, select, grow the train sets,
/// mark selections consumed, retrain every member on its accumulated set.
/// The returned report holds *pool* indices. An empty selection leaves the
/// mixture untouched.
inline SelectionReport generalization_iteration(Mixture& mix, UnlabeledPool& pool,
                                                TrainSets& train_sets,
                                                const GeneralizationConfig& config,
                                                const Prng& prng) {
  config.validate(mix.size());
  if (train_sets.size() != mix.size()) throw ArgumentError("train_sets do not match mixture size");
  const auto candidates = pool.unconsumed_indices();
  SelectionReport report;
  report.selected.assign(mix.size(), {});
  report.skipped.assign(mix.size(), 0);
  if (!candidates.empty()) {
    const DistanceMatrix dist = distance_matrix(mix, gather_rows(pool.images, candidates));
    std::vector<std::size_t> order(mix.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    report = select_samples(dist, config.psi, order);
    for (auto& sel : report.selected) {
      for (auto& k : sel) k = candidates[k];
    }
  }
  for (std::size_t c = 0; c < mix.size(); ++c) {
    append_rows(train_sets[c], gather_rows(pool.images, report.selected[c]));
    for (auto k : report.selected[c]) pool.consumed[k] = true;
  }
  // Nothing new to learn from: the train sets are unchanged.
  if (report.total() == 0) return report;
  if (config.cold_restart) {
    const Prng init = prng.split("cold-restart");
    for (auto& m : mix.members) {
      Prng stream = member_init_stream(init, m.label);
      m.model = VaeModel<float>::init(mix.config, stream);
      m.optimizer = RmsPropState<float>(mix.config.optimizer);
    }
  }
  train_mixture(mix, train_sets, prng.split("retrain"), config.retrain_epochs);
  return report;
}

struct TraceEntry {
  int iteration = 0;
  std::size_t pool_size = 0;
  double accuracy = 0.0;
  std::size_t selected = 0;
};

inline double evaluate_accuracy(const Mixture& mix, const Tensorf& images,
                                const std::vector<Label>& labels) {
  return accuracy(predict_batch(mix, images), labels);
}

using IterationObserver = std::function<void(int iteration, const SelectionReport&)>;

/// Iteration 0 is the pre-generalization accuracy. Stops at max_iterations,
/// when the pool is empty, or when an iteration selects nothing.
inline std::vector<TraceEntry> run_generalization(Mixture& mix, UnlabeledPool& pool,
                                                  TrainSets& train_sets,
                                                  const GeneralizationConfig& config,
                                                  const Tensorf& eval_images,
                                                  const std::vector<Label>& eval_labels,
                                                  const Prng& prng,
                                                  const IterationObserver& on_iteration = {}) {
  config.validate(mix.size());
  std::vector<TraceEntry> trace;
  trace.push_back({0, pool.remaining(), evaluate_accuracy(mix, eval_images, eval_labels), 0});
  for (int it = 1; !config.max_iterations || it <= *config.max_iterations; ++it) {
    if (pool.remaining() == 0) break;
    const auto report =
        generalization_iteration(mix, pool, train_sets, config, prng.split(static_cast<std::uint64_t>(it)));
    if (report.total() == 0) break;
    if (on_iteration) on_iteration(it, report);
    trace.push_back({it, pool.remaining(), evaluate_accuracy(mix, eval_images, eval_labels),
                     report.total()});
  }
  return trace;
}

}  // namespace movae
