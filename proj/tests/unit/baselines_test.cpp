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

#include <gtest/gtest.h>

#include <vector>

#include "movae/baselines.hpp"
#include "test_support.hpp"

namespace movae {
namespace {

LabeledDataset line(const std::vector<float>& xs, const std::vector<Label>& labels) {
  Tensorf t(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) t(static_cast<Eigen::Index>(i), 0) = xs[i];
  return LabeledDataset(std::move(t), labels);
}

constexpr Label A = 0, B = 1, C = 2;

TEST(Knn, MajorityOfThreeNearest) {
  const auto train = line({1, 2, 9, 20}, {A, A, B, B});
  const std::vector<float> q{0};
  EXPECT_EQ(knn_predict(train, q), A);
}

TEST(Knn, ThreeWayTieGoesToNearest) {
  const auto train = line({2, 1, 3, 50}, {A, B, C, A});
  const std::vector<float> q{0};
  EXPECT_EQ(knn_predict(train, q), B);
}

TEST(Knn, EqualDistancesPreferLowerIndex) {
  const auto train = line({-1, 1}, {B, A});
  const std::vector<float> q{0};
  EXPECT_EQ(knn_predict(train, q, 1), B);
}

TEST(Knn, KLargerThanTrainingSet) {
  const auto train = line({5, 6}, {C, A});
  const std::vector<float> q{0};
  EXPECT_EQ(knn_predict(train, q, 3), C);
}

TEST(Knn, InvalidInputs) {
  const auto train = line({1}, {A});
  EXPECT_THROW(knn_predict(LabeledDataset{}, std::vector<float>{0}), ArgumentError);
  EXPECT_THROW(knn_predict(train, std::vector<float>{0, 1}), DimensionError);
  EXPECT_THROW(knn_predict(train, std::vector<float>{0}, 0), ArgumentError);
}

TEST(Knn, SyntheticImages) {
  Prng p(1);
  std::vector<std::vector<float>> tr, te;
  std::vector<Label> tl, el;
  for (int i = 0; i < 10; ++i) {
    tr.push_back(testing::half_image(i % 2 == 0, p));
    tl.push_back(i % 2);
    te.push_back(testing::half_image(i % 2 == 0, p, 0.3f));
    el.push_back(i % 2);
  }
  const LabeledDataset train(testing::rows_of(tr), tl), test(testing::rows_of(te), el);
  EXPECT_EQ(knn_accuracy(train, test), 1.0);
}

TEST(RandomGuess, Values) {
  EXPECT_DOUBLE_EQ(random_guess_accuracy(5), 0.2);
  EXPECT_NEAR(random_guess_accuracy(1623), 0.000616, 1e-6);
  EXPECT_DOUBLE_EQ(random_guess_accuracy(1), 1.0);
  EXPECT_THROW(random_guess_accuracy(0), ArgumentError);
}

}  // namespace
}  // namespace movae
