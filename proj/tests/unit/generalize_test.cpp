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

#include <numeric>
#include <set>
#include <vector>

#include "movae/generalize.hpp"
#include "test_support.hpp"

namespace movae {
namespace {

DistanceMatrix from_rows(const std::vector<std::vector<double>>& d) {
  DistanceMatrix m(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d[0].size()));
  for (std::size_t k = 0; k < d.size(); ++k)
    for (std::size_t c = 0; c < d[k].size(); ++c) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = d[k][c];
  return m;
}

std::vector<std::size_t> ascending(std::size_t n) {
  std::vector<std::size_t> o(n);
  std::iota(o.begin(), o.end(), std::size_t{0});
  return o;
}

SelectionReport select(const std::vector<std::vector<double>>& d, int psi) {
  const auto order = ascending(d[0].size());
  return select_samples(from_rows(d), psi, order);
}

// Sample 0 is near both classes, so it sits in both top-4 lists.
const std::vector<std::vector<double>> kSix{
    {0.1, 0.1}, {0.2, 0.6}, {0.3, 0.5}, {0.4, 0.4}, {0.5, 0.3}, {0.6, 0.2}};

TEST(Select, HandWorkedSixByTwo) {
  const auto r = select(kSix, 4);
  EXPECT_EQ(r.selected[0], (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(r.selected[1], (std::vector<std::size_t>{5, 4}));
  EXPECT_EQ(r.skipped[0], 1u);
  EXPECT_EQ(r.skipped[1], 1u);
  EXPECT_EQ(r.total(), 4u);
}

TEST(Select, SingleClassNeverExcludes) {
  const auto r = select({{0.3}, {0.1}, {0.2}}, 2);
  EXPECT_EQ(r.selected[0], (std::vector<std::size_t>{1, 2}));
}

TEST(Select, EmptyPoolSelectsNothing) {
  const auto order = ascending(2);
  const auto r = select_samples(DistanceMatrix(0, 2), 4, order);
  EXPECT_EQ(r.total(), 0u);
}

TEST(Select, QuotaIsFloorOfPsiOverClasses) {
  Prng p(1);
  std::vector<std::vector<double>> d(40, std::vector<double>(3));
  for (auto& row : d) for (auto& v : row) v = p.uniform(0, 2);
  const auto r = select(d, 7);  // floor(7/3) = 2
  for (const auto& s : r.selected) EXPECT_LE(s.size(), 2u);
}

TEST(Select, ClearlySeparatedClassesFillQuota) {
  // Rows 0-9 belong to class 0, 10-19 to class 1; 40 rows of distant noise.
  std::vector<std::vector<double>> d;
  for (int k = 0; k < 60; ++k) {
    if (k < 10) d.push_back({0.01 * k, 1.9});
    else if (k < 20) d.push_back({1.9, 0.01 * k});
    else d.push_back({1.0 + 0.001 * k, 1.0 + 0.001 * k});
  }
  const auto r = select(d, 10);
  ASSERT_EQ(r.selected[0].size(), 5u);
  ASSERT_EQ(r.selected[1].size(), 5u);
  for (auto k : r.selected[0]) EXPECT_LT(k, 10u);
  for (auto k : r.selected[1]) {
    EXPECT_GE(k, 10u);
    EXPECT_LT(k, 20u);
  }
}

TEST(Select, MatchesReferenceOnRandomInstances) {
  Prng p(2024);
  for (int t = 0; t < 300; ++t) {
    const auto n = 1 + p.below(20);
    const auto c = 1 + p.below(4);
    const int psi = static_cast<int>(1 + p.below(12));
    const bool coarse = t % 2 == 1;  // coarse values force ties
    std::vector<std::vector<double>> d(n, std::vector<double>(c));
    for (auto& row : d)
      for (auto& v : row) v = coarse ? 0.25 * static_cast<double>(p.below(5)) : p.uniform(0, 2);
    const auto r = select(d, psi);
    const auto ref = testing::reference_select(d, psi);
    ASSERT_EQ(r.selected, ref) << "instance " << t << " n=" << n << " c=" << c << " psi=" << psi;
  }
}

TEST(Select, InvariantsOnRandomInstances) {
  Prng p(7);
  for (int t = 0; t < 100; ++t) {
    const auto n = 1 + p.below(30);
    const auto c = 2 + p.below(4);
    const int psi = static_cast<int>(c + p.below(20));
    std::vector<std::vector<double>> d(n, std::vector<double>(c));
    for (auto& row : d) for (auto& v : row) v = p.uniform(0, 2);
    const auto r = select(d, psi);
    EXPECT_LE(r.total(), static_cast<std::size_t>(psi));
    std::set<std::size_t> seen;
    for (const auto& s : r.selected)
      for (auto k : s) {
        EXPECT_LT(k, n);
        EXPECT_TRUE(seen.insert(k).second) << "row selected twice";
      }
  }
}

TEST(SortedCandidates, StableTies) {
  const auto m = from_rows({{0.5}, {0.2}, {0.5}, {0.2}});
  EXPECT_EQ(sorted_candidates(m, 0), (std::vector<std::size_t>{1, 3, 0, 2}));
}

TEST(GeneralizationConfig, Validation) {
  GeneralizationConfig c;
  c.psi = 1;
  EXPECT_THROW(c.validate(2), ConfigError);
  c.psi = 2;
  EXPECT_NO_THROW(c.validate(2));
  c.max_iterations = -1;
  EXPECT_THROW(c.validate(2), ConfigError);
}

class Synthetic : public ::testing::Test {
 protected:
  void SetUp() override {
    VaeConfig cfg;
    cfg.hidden_dim = 64;
    cfg.latent_dim = 8;
    cfg.epochs = 60;
    Prng p(11);
    mix = build_mixture({0, 1}, cfg, p);
    sets = {testing::rows_of({testing::half_image(true, p, 0.02f)}),
            testing::rows_of({testing::half_image(false, p, 0.02f)})};
    train_mixture(mix, sets, p.split("train"));
    std::vector<std::vector<float>> imgs;
    for (int i = 0; i < 40; ++i) {
      truth.push_back(i % 2 == 0 ? 0 : 1);
      imgs.push_back(testing::half_image(i % 2 == 0, p, 0.2f));
    }
    pool.images = testing::rows_of(imgs);
    pool.consumed.assign(40, false);
  }
  Mixture mix;
  TrainSets sets;
  UnlabeledPool pool;
  std::vector<Label> truth;
};

TEST_F(Synthetic, IterationGrowsSetsWithCorrectLabels) {
  GeneralizationConfig cfg;
  cfg.psi = 10;
  cfg.retrain_epochs = 5;
  const auto r = generalization_iteration(mix, pool, sets, cfg, Prng(3));
  ASSERT_EQ(r.total(), 10u);
  std::size_t correct = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_EQ(sets[c].rows(), 1 + static_cast<Eigen::Index>(r.selected[c].size()));
    for (auto k : r.selected[c]) {
      EXPECT_TRUE(pool.consumed[k]);
      correct += truth[k] == static_cast<Label>(c);
    }
  }
  EXPECT_GE(static_cast<double>(correct) / 10.0, 0.9);
  EXPECT_EQ(pool.remaining(), 30u);
}

TEST_F(Synthetic, RunRecordsIterationZeroAndShrinksPool) {
  GeneralizationConfig cfg;
  cfg.psi = 10;
  cfg.max_iterations = 3;
  cfg.retrain_epochs = 3;
  const Tensorf eval = pool.images;
  std::vector<int> seen;
  const auto trace = run_generalization(mix, pool, sets, cfg, eval, truth, Prng(4),
                                        [&](int it, const SelectionReport&) { seen.push_back(it); });
  ASSERT_EQ(trace.size(), 4u);
  EXPECT_EQ(trace[0].iteration, 0);
  EXPECT_EQ(trace[0].pool_size, 40u);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LT(trace[i].pool_size, trace[i - 1].pool_size);
  EXPECT_EQ(trace.back().pool_size, 10u);
}

TEST_F(Synthetic, ZeroIterationsIsBaselineOnly) {
  GeneralizationConfig cfg;
  cfg.psi = 10;
  cfg.max_iterations = 0;
  const auto trace = run_generalization(mix, pool, sets, cfg, pool.images, truth, Prng(5));
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(pool.remaining(), 40u);
  EXPECT_DOUBLE_EQ(trace[0].accuracy, 1.0);
}

TEST_F(Synthetic, ExhaustedPoolStops) {
  GeneralizationConfig cfg;
  cfg.psi = 100;
  cfg.retrain_epochs = 1;
  const auto trace = run_generalization(mix, pool, sets, cfg, pool.images, truth, Prng(6));
  EXPECT_LE(trace.size(), 41u);
  const auto again = generalization_iteration(mix, pool, sets, cfg, Prng(7));
  if (pool.remaining() == 0) {
    EXPECT_EQ(again.total(), 0u);
  }
}

TEST_F(Synthetic, ColdRestartIsDeterministic) {
  GeneralizationConfig cfg;
  cfg.psi = 10;
  cfg.retrain_epochs = 2;
  cfg.cold_restart = true;
  Mixture m2 = mix;
  TrainSets s2 = sets;
  UnlabeledPool p2 = pool;
  generalization_iteration(mix, pool, sets, cfg, Prng(8));
  generalization_iteration(m2, p2, s2, cfg, Prng(8));
  EXPECT_EQ(mix.members[0].model.decoder_out.weights, m2.members[0].model.decoder_out.weights);
  EXPECT_EQ(pool.consumed, p2.consumed);
}

}  // namespace
}  // namespace movae
