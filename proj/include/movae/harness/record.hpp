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
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "movae/error.hpp"
#include "movae/generalize.hpp"
#include "movae/harness/config.hpp"

namespace movae {

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // population; 0 for a single repeat
};

inline Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  for (double v : values) a.mean += v;
  a.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.stddev = std::sqrt(ss / static_cast<double>(values.size()));
  return a;
}

struct RepeatRecord {
  int repeat = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  std::optional<double> knn_accuracy;
  std::vector<TraceEntry> trace;
  /// Fraction of each iteration's selections whose hidden label matched the
  /// class that claimed them (semisup only; diagnostic).
  std::vector<double> selection_purity;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::map<std::string, double> seconds;
};

struct MetricsRecord {
  Protocol protocol = Protocol::supervised;
  nlohmann::json config;
  std::vector<RepeatRecord> repeats;
  std::optional<double> random_guess;

  std::vector<double> accuracies() const {
    std::vector<double> v;
    for (const auto& r : repeats) v.push_back(r.accuracy);
    return v;
  }
  std::optional<std::vector<double>> knn_accuracies() const {
    std::vector<double> v;
    for (const auto& r : repeats) {
      if (!r.knn_accuracy) return std::nullopt;
      v.push_back(*r.knn_accuracy);
    }
    return v;
  }
  Aggregate accuracy() const { return aggregate(accuracies()); }
};

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["protocol"] = std::string(protocol_name(c.resolved_protocol()));
  j["train_images"] = c.train_images;
  j["train_labels"] = c.train_labels;
  j["test_images"] = c.test_images;
  j["test_labels"] = c.test_labels;
  j["omniglot_dir"] = c.omniglot_dir;
  j["shots"] = c.shots;
  j["ways"] = c.ways;
  j["test_per_class"] = c.episode().test_per_class;
  j["psi"] = c.psi;
  j["iterations"] = c.iterations ? nlohmann::json(*c.iterations) : nlohmann::json("until-exhausted");
  j["augment"] = c.augment.value_or(c.resolved_protocol() == Protocol::oneshot ? "omniglot" : "none");
  j["pool_size"] = c.resolved_pool_size();
  j["metric"] = c.metric;
  j["seed"] = *c.seed;
  j["repeats"] = c.repeats;
  const auto v = c.vae_config();
  j["vae"] = {{"input_dim", v.input_dim},
              {"hidden_dim", v.hidden_dim},
              {"latent_dim", v.latent_dim},
              {"epochs", v.epochs},
              {"batch_size", v.batch_size},
              {"learning_rate", v.optimizer.learning_rate},
              {"rho", v.optimizer.rho},
              {"epsilon", v.optimizer.epsilon}};
  j["retrain_epochs"] = c.retrain_epochs.value_or(v.epochs);
  j["cold_restart"] = c.cold_restart;
  j["train_per_class"] = c.train_per_class;
  j["test_limit"] = c.test_limit;
  j["knn_k"] = c.knn_k;
  return j;
}

/// Summary JSON. Wall-clock seconds go under "timing" so the remainder is a
/// pure function of (config, seed).
inline nlohmann::json to_json(const MetricsRecord& r, bool include_timing = true) {
  nlohmann::json j;
  j["schema"] = "movae.metrics/1";
  j["protocol"] = std::string(protocol_name(r.protocol));
  j["config"] = r.config;
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& rep : r.repeats) {
    nlohmann::json e;
    e["repeat"] = rep.repeat;
    e["seed"] = rep.seed;
    e["accuracy"] = rep.accuracy;
    if (rep.knn_accuracy) e["knn_accuracy"] = *rep.knn_accuracy;
    e["train_size"] = rep.train_size;
    e["test_size"] = rep.test_size;
    if (!rep.trace.empty()) {
      nlohmann::json t = nlohmann::json::array();
      for (std::size_t i = 0; i < rep.trace.size(); ++i) {
        const auto& te = rep.trace[i];
        nlohmann::json row = {{"iteration", te.iteration},
                              {"pool_size", te.pool_size},
                              {"accuracy", te.accuracy},
                              {"selected", te.selected}};
        if (i > 0 && i - 1 < rep.selection_purity.size()) row["selection_purity"] = rep.selection_purity[i - 1];
        t.push_back(row);
      }
      e["trace"] = t;
    }
    if (include_timing) e["timing"] = rep.seconds;
    reps.push_back(e);
  }
  j["repeats"] = reps;
  const auto acc = r.accuracy();
  j["aggregate"] = {{"accuracy_mean", acc.mean}, {"accuracy_stddev", acc.stddev}};
  if (auto knn = r.knn_accuracies()) {
    const auto k = aggregate(*knn);
    j["aggregate"]["knn_accuracy_mean"] = k.mean;
    j["aggregate"]["knn_accuracy_stddev"] = k.stddev;
  }
  if (r.random_guess) j["aggregate"]["random_guess_accuracy"] = *r.random_guess;
  return j;
}

/// Columns: iteration, pool_size, accuracy for one repeat.
inline std::string trace_csv(const RepeatRecord& rep) {
  std::string s = "iteration,pool_size,accuracy\n";
  char buf[128];
  for (const auto& t : rep.trace) {
    std::snprintf(buf, sizeof buf, "%d,%zu,%.17g\n", t.iteration, t.pool_size, t.accuracy);
    s += buf;
  }
  return s;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace movae
