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
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "movae/datasets.hpp"
#include "movae/error.hpp"
#include "movae/metrics.hpp"
#include "movae/parallel.hpp"

namespace movae {

/// Majority vote of the k nearest training images (Euclidean, raw pixels).
/// Equal distances rank the lower training index first. A vote tie goes to
/// whichever tied class owns the nearest neighbour.
inline Label knn_predict(const LabeledDataset& train, std::span<const float> query, std::size_t k = 3) {
  if (train.size() == 0) throw ArgumentError("knn_predict: empty training set");
  if (k < 1) throw ArgumentError("knn_predict: k must be >= 1");
  if (query.size() != static_cast<std::size_t>(train.images.cols())) {
    throw DimensionError("knn_predict: query width does not match training images");
  }
  const Eigen::Map<const Eigen::RowVectorXf> q(query.data(), static_cast<Eigen::Index>(query.size()));
  const Eigen::VectorXf d2 = (train.images.rowwise() - q).rowwise().squaredNorm();

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t kk = std::min(k, train.size());
  auto closer = [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    return d2(ia) < d2(ib) || (d2(ia) == d2(ib) && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end(), closer);

  std::map<Label, std::size_t> votes;
  for (std::size_t r = 0; r < kk; ++r) ++votes[train.labels[order[r]]];
  std::size_t best_votes = 0;
  for (const auto& [_, v] : votes) best_votes = std::max(best_votes, v);
  for (std::size_t r = 0; r < kk; ++r) {
    const Label l = train.labels[order[r]];
    if (votes[l] == best_votes) return l;
  }
  return train.labels[order[0]];
}

inline std::vector<Label> knn_predict_batch(const LabeledDataset& train, const Tensorf& queries,
                                            std::size_t k = 3) {
  std::vector<Label> out(static_cast<std::size_t>(queries.rows()));
  const auto width = static_cast<std::size_t>(queries.cols());
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = knn_predict(train, std::span<const float>(queries.row(static_cast<Eigen::Index>(i)).data(), width), k);
  });
  return out;
}

inline double knn_accuracy(const LabeledDataset& train, const LabeledDataset& test, std::size_t k = 3) {
  return accuracy(knn_predict_batch(train, test.images, k), test.labels);
}

inline double random_guess_accuracy(std::size_t n_classes) {
  if (n_classes < 1) throw ArgumentError("random_guess_accuracy: need at least one class");
  return 1.0 / static_cast<double>(n_classes);
}

}  // namespace movae
