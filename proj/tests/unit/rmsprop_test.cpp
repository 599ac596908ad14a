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

#include <cmath>
#include <limits>
#include <vector>

#include "movae/prng.hpp"
#include "movae/rmsprop.hpp"

namespace movae {
namespace {

TEST(RmsProp, ZeroGradientLeavesParametersAndDecaysCache) {
  Tensord w = Tensord::Constant(2, 2, 0.5);
  RmsPropState<double> st(RmsPropConfig{});
  st.cache = {Tensord::Constant(2, 2, 4.0)};
  const std::vector<Tensord> g{Tensord::Zero(2, 2)};
  rmsprop_step<double>({std::ref(w)}, g, st);
  EXPECT_EQ(w, Tensord::Constant(2, 2, 0.5));
  EXPECT_NEAR(st.cache[0](0, 0), 3.6, 1e-12);
}

TEST(RmsProp, FirstStepMagnitude) {
  Tensord w = Tensord::Zero(1, 1);
  RmsPropState<double> st(RmsPropConfig{0.001, 0.9, 1e-7});
  const std::vector<Tensord> g{Tensord::Ones(1, 1)};
  rmsprop_step<double>({std::ref(w)}, g, st);
  // 0.001 / (sqrt(0.1) + 1e-7)
  EXPECT_NEAR(-w(0, 0), 3.1623e-3, 1e-7);
  EXPECT_NEAR(-w(0, 0), 0.001 / (std::sqrt(0.1) + 1e-7), 1e-15);
}

TEST(RmsProp, TwoStepsMatchScalarOracle) {
  const double lr = 0.01, rho = 0.8, eps = 1e-7;
  Tensord w = Tensord::Constant(1, 1, 1.0);
  RmsPropState<double> st(RmsPropConfig{lr, rho, eps});
  double p = 1.0, c = 0.0;
  for (double g : {0.3, -1.2}) {
    rmsprop_step<double>({std::ref(w)}, std::vector<Tensord>{Tensord::Constant(1, 1, g)}, st);
    c = rho * c + (1 - rho) * g * g;
    p -= lr * g / (std::sqrt(c) + eps);
  }
  EXPECT_NEAR(w(0, 0), p, 1e-7);
}

TEST(RmsProp, NonFiniteGradientNamesParameter) {
  Tensord a = Tensord::Zero(1, 2), b = Tensord::Zero(1, 2);
  RmsPropState<double> st(RmsPropConfig{});
  std::vector<Tensord> g{Tensord::Zero(1, 2), Tensord::Zero(1, 2)};
  g[1](0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    rmsprop_step<double>({std::ref(a), std::ref(b)}, g, st);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("parameter 1"), std::string::npos) << e.what();
  }
  EXPECT_EQ(a, Tensord::Zero(1, 2));
}

TEST(RmsProp, CacheStaysNonNegative) {
  Prng p(12);
  Tensord w = Tensord::Zero(3, 3);
  RmsPropState<double> st(RmsPropConfig{});
  for (int step = 0; step < 200; ++step) {
    Tensord g(3, 3);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = p.uniform(-10, 10) * (step % 7 == 0 ? 0 : 1);
    rmsprop_step<double>({std::ref(w)}, std::vector<Tensord>{g}, st);
    ASSERT_GE(st.cache[0].minCoeff(), 0.0);
  }
}

TEST(RmsProp, RejectsBadHyperparameters) {
  EXPECT_THROW(RmsPropState<double>(RmsPropConfig{0.0, 0.9, 1e-7}), ConfigError);
  EXPECT_THROW(RmsPropState<double>(RmsPropConfig{0.001, 1.0, 1e-7}), ConfigError);
  EXPECT_THROW(RmsPropState<double>(RmsPropConfig{0.001, 0.9, 0.0}), ConfigError);
}

TEST(RmsProp, ShapeMismatchIsDimensionError) {
  Tensord w = Tensord::Zero(2, 2);
  RmsPropState<double> st(RmsPropConfig{});
  EXPECT_THROW(rmsprop_step<double>({std::ref(w)}, std::vector<Tensord>{Tensord::Zero(2, 3)}, st), DimensionError);
}

}  // namespace
}  // namespace movae
