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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "movae/error.hpp"
#include "movae/metrics.hpp"
#include "movae/parallel.hpp"
#include "movae/prng.hpp"
#include "movae/tensor.hpp"
#include "movae/vae.hpp"

namespace movae {

using Label = int;

/// n_images x n_classes, entry (k, i) = distance(image k, member i's reconstruction).
using DistanceMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct MixtureMember {
  Label label = 0;
  VaeModel<float> model;
  RmsPropState<float> optimizer;
  bool trained = false;
};

/// One VAE per class, kept in ascending label order.
struct Mixture {
  VaeConfig config;
  MetricKind metric = MetricKind::pcc;
  std::vector<MixtureMember> members;

  std::size_t size() const { return members.size(); }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.label);
    return out;
  }

  std::optional<std::size_t> index_of(Label label) const {
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (members[i].label == label) return i;
    }
    return std::nullopt;
  }

  bool trained() const {
    return !members.empty() &&
           std::all_of(members.begin(), members.end(), [](const auto& m) { return m.trained; });
  }
};

struct Prediction {
  Label label = 0;
  std::size_t index = 0;
  std::vector<double> distances;
};

/// Stream used to initialize the member for `label`.
inline Prng member_init_stream(const Prng& prng, Label label) {
  return prng.split("init").split(static_cast<std::uint64_t>(static_cast<std::int64_t>(label)));
}

inline Mixture build_mixture(std::vector<Label> class_labels, const VaeConfig& config,
                             const Prng& prng, MetricKind metric = MetricKind::pcc) {
  config.validate();
  std::sort(class_labels.begin(), class_labels.end());
  if (std::adjacent_find(class_labels.begin(), class_labels.end()) != class_labels.end()) {
    throw ArgumentError("build_mixture: duplicate class labels");
  }
  if (class_labels.size() < 2) throw ArgumentError("build_mixture: need at least 2 classes");
  Mixture mix;
  mix.config = config;
  mix.metric = metric;
  mix.members.resize(class_labels.size());
  parallel_for(class_labels.size(), [&](std::size_t i) {
    Prng stream = member_init_stream(prng, class_labels[i]);
    auto& m = mix.members[i];
    m.label = class_labels[i];
    m.model = VaeModel<float>::init(config, stream);
    m.optimizer = RmsPropState<float>(config.optimizer);
  });
  return mix;
}

/// Trains (or continues training) member `index` on `data` for `epochs` epochs.
inline std::vector<double> train_member(Mixture& mix, std::size_t index, const Tensorf& data,
                                        const Prng& stream, int epochs) {
  VaeConfig cfg = mix.config;
  cfg.epochs = epochs;
  Prng local = stream;
  auto& m = mix.members.at(index);
  auto history = train_epochs(m.model, data, cfg, m.optimizer, local);
  m.trained = true;
  return history;
}

/// Trains every member on its own set; train_sets[i] belongs to members[i].
/// Member i draws from prng.split(label_i).
inline std::vector<std::vector<double>> train_mixture(Mixture& mix,
                                                      const std::vector<Tensorf>& train_sets,
                                                      const Prng& prng,
                                                      std::optional<int> epochs = std::nullopt) {
  if (train_sets.size() != mix.size()) {
    throw ArgumentError("train_mixture: " + std::to_string(train_sets.size()) +
                        " train sets for " + std::to_string(mix.size()) + " members");
  }
  const int e = epochs.value_or(mix.config.epochs);
  std::vector<std::vector<double>> histories(mix.size());
  parallel_for(mix.size(), [&](std::size_t i) {
    const Prng stream =
        prng.split(static_cast<std::uint64_t>(static_cast<std::int64_t>(mix.members[i].label)));
    histories[i] = train_member(mix, i, train_sets[i], stream, e);
  });
  return histories;
}

/// Lowest index among the minima.
inline std::size_t argmin_lowest(std::span<const double> d) {
  if (d.empty()) throw ArgumentError("argmin over empty distances");
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] < d[best]) best = i;
  }
  return best;
}

inline void require_trained(const Mixture& mix) {
  if (mix.members.empty()) throw StateError("mixture has no members");
  for (const auto& m : mix.members) {
    if (!m.trained) throw StateError("member for class " + std::to_string(m.label) + " is untrained");
  }
}

inline DistanceMatrix distance_matrix(const Mixture& mix, const Tensorf& images) {
  require_trained(mix);
  require_width(images, mix.config.input_dim, "distance_matrix");
  const Eigen::Index n = images.rows();
  const Eigen::Index classes = static_cast<Eigen::Index>(mix.size());
  DistanceMatrix dist(n, classes);
  constexpr Eigen::Index kChunk = 512;
  const Eigen::Index chunks = (n + kChunk - 1) / kChunk;
  // One work item per (member, chunk); each writes a disjoint block of `dist`.
  parallel_for(static_cast<std::size_t>(classes * chunks), [&](std::size_t item) {
    const Eigen::Index member = static_cast<Eigen::Index>(item) / chunks;
    const Eigen::Index chunk = static_cast<Eigen::Index>(item) % chunks;
    const Eigen::Index start = chunk * kChunk;
    const Eigen::Index rows = std::min(kChunk, n - start);
    const Tensorf batch = images.middleRows(start, rows);
    const Tensorf rec = reconstruct(mix.members[static_cast<std::size_t>(member)].model, batch);
    const auto width = static_cast<std::size_t>(images.cols());
    for (Eigen::Index r = 0; r < rows; ++r) {
      dist(start + r, member) =
          distance(std::span<const float>(batch.row(r).data(), width),
                   std::span<const float>(rec.row(r).data(), width), mix.metric);
    }
  });
  return dist;
}

inline Prediction predict(const Mixture& mix, std::span<const float> image) {
  Tensorf x(1, static_cast<Eigen::Index>(image.size()));
  std::copy(image.begin(), image.end(), x.data());
  const DistanceMatrix d = distance_matrix(mix, x);
  Prediction p;
  p.distances.assign(d.data(), d.data() + d.size());
  p.index = argmin_lowest(p.distances);
  p.label = mix.members[p.index].label;
  return p;
}

/// Per-row argmin labels of a distance matrix.
inline std::vector<Label> labels_from_distances(const Mixture& mix, const DistanceMatrix& d) {
  std::vector<Label> out(static_cast<std::size_t>(d.rows()));
  for (Eigen::Index r = 0; r < d.rows(); ++r) {
    const std::span<const double> row(d.row(r).data(), static_cast<std::size_t>(d.cols()));
    out[static_cast<std::size_t>(r)] = mix.members[argmin_lowest(row)].label;
  }
  return out;
}

inline std::vector<Label> predict_batch(const Mixture& mix, const Tensorf& images) {
  return labels_from_distances(mix, distance_matrix(mix, images));
}

}  // namespace movae
