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
#include <vector>

#include "movae/dense.hpp"

namespace movae {
namespace {

using Net = std::vector<DenseLayer<double>>;

Tensord random_tensor(Eigen::Index r, Eigen::Index c, Prng& p) {
  Tensord t(r, c);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = p.uniform(-1, 1);
  return t;
}

Net random_net(const std::vector<int>& widths, const std::vector<Activation>& acts, Prng& p) {
  Net net;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    net.emplace_back(random_tensor(widths[i], widths[i + 1], p), random_tensor(1, widths[i + 1], p), acts[i]);
  }
  return net;
}

// Plain triple-loop evaluation, independent of the Eigen path.
std::vector<double> hand_forward(const Net& net, std::vector<double> x) {
  for (const auto& l : net) {
    std::vector<double> y(static_cast<std::size_t>(l.fan_out()));
    for (Eigen::Index j = 0; j < l.fan_out(); ++j) {
      double s = l.bias(0, j);
      for (Eigen::Index i = 0; i < l.fan_in(); ++i) s += x[static_cast<std::size_t>(i)] * l.weights(i, j);
      switch (l.activation) {
        case Activation::relu: s = s > 0 ? s : 0; break;
        case Activation::sigmoid: s = 1 / (1 + std::exp(-s)); break;
        case Activation::linear: break;
      }
      y[static_cast<std::size_t>(j)] = s;
    }
    x = y;
  }
  return x;
}

TEST(ForwardPass, IdentityLinearLayer) {
  Net net{DenseLayer<double>(Tensord::Identity(2, 2), Tensord::Zero(1, 2), Activation::linear)};
  Tensord x(1, 2);
  x << 0.3, 0.7;
  const auto out = forward_pass<double>(net, x).output;
  EXPECT_DOUBLE_EQ(out(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(out(0, 1), 0.7);
}

TEST(ForwardPass, ReluClipsNegatives) {
  Net net{DenseLayer<double>(Tensord::Identity(2, 2), Tensord::Zero(1, 2), Activation::relu)};
  Tensord x(1, 2);
  x << -1.0, 2.0;
  const auto out = forward_pass<double>(net, x).output;
  EXPECT_EQ(out(0, 0), 0.0);
  EXPECT_EQ(out(0, 1), 2.0);
}

TEST(ForwardPass, MatchesHandArithmetic) {
  Prng p(17);
  const Net net = random_net({3, 2, 1}, {Activation::relu, Activation::sigmoid}, p);
  const Tensord x = random_tensor(4, 3, p);
  const auto out = forward_pass<double>(net, x);
  ASSERT_EQ(out.output.rows(), 4);
  ASSERT_EQ(out.output.cols(), 1);
  ASSERT_EQ(out.caches.size(), 2u);
  for (Eigen::Index r = 0; r < 4; ++r) {
    const auto expect = hand_forward(net, {x(r, 0), x(r, 1), x(r, 2)});
    EXPECT_NEAR(out.output(r, 0), expect[0], 1e-6);
  }
}

TEST(ForwardPass, WidthMismatchIsDimensionError) {
  Prng p(1);
  const Net net = random_net({3, 2}, {Activation::linear}, p);
  EXPECT_THROW(forward_pass<double>(net, Tensord::Zero(1, 4)), DimensionError);
}

TEST(BackwardPass, ZeroOutputGradientGivesZeroGradients) {
  Prng p(2);
  const Net net = random_net({4, 3, 2}, {Activation::relu, Activation::sigmoid}, p);
  const auto fwd = forward_pass<double>(net, random_tensor(5, 4, p));
  const auto bwd = backward_pass<double>(net, fwd.caches, Tensord::Zero(5, 2));
  for (const auto& g : bwd.parameter_gradients) {
    EXPECT_EQ(g.weights.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.bias.cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(bwd.input_gradient.cwiseAbs().maxCoeff(), 0.0);
}

TEST(BackwardPass, SigmoidDerivativeAtZero) {
  Tensord pre = Tensord::Zero(1, 1);
  EXPECT_DOUBLE_EQ(activation_derivative(pre, Activation::sigmoid)(0, 0), 0.25);
}

TEST(BackwardPass, MismatchedCachesAreDimensionErrors) {
  Prng p(3);
  const Net net = random_net({4, 3, 2}, {Activation::relu, Activation::linear}, p);
  const auto fwd = forward_pass<double>(net, random_tensor(5, 4, p));
  std::vector<LayerCache<double>> short_caches(fwd.caches.begin(), fwd.caches.begin() + 1);
  EXPECT_THROW(backward_pass<double>(net, short_caches, Tensord::Zero(5, 2)), DimensionError);
  EXPECT_THROW(backward_pass<double>(net, fwd.caches, Tensord::Zero(4, 2)), DimensionError);
}

// Loss = sum(W_out .* y) for a fixed random weighting W_out.
double weighted_output(const Net& net, const Tensord& x, const Tensord& w_out) {
  return forward_pass<double>(net, x).output.cwiseProduct(w_out).sum();
}

TEST(BackwardPass, MatchesCentralFiniteDifferences) {
  Prng p(4);
  for (int trial = 0; trial < 5; ++trial) {
    Net net = random_net({4, 3, 2},
                         {trial % 2 ? Activation::sigmoid : Activation::relu, Activation::sigmoid}, p);
    const Tensord x = random_tensor(6, 4, p);
    const Tensord w_out = random_tensor(6, 2, p);
    const auto fwd = forward_pass<double>(net, x);
    const auto bwd = backward_pass<double>(net, fwd.caches, w_out);
    const double h = 1e-5;
    for (std::size_t l = 0; l < net.size(); ++l) {
      for (int which = 0; which < 2; ++which) {
        Tensord& param = which == 0 ? net[l].weights : net[l].bias;
        const Tensord& grad = which == 0 ? bwd.parameter_gradients[l].weights : bwd.parameter_gradients[l].bias;
        for (Eigen::Index i = 0; i < param.size(); ++i) {
          const double saved = param.data()[i];
          param.data()[i] = saved + h;
          const double up = weighted_output(net, x, w_out);
          param.data()[i] = saved - h;
          const double down = weighted_output(net, x, w_out);
          param.data()[i] = saved;
          const double numeric = (up - down) / (2 * h);
          const double analytic = grad.data()[i];
          const double rel = std::abs(numeric - analytic) / std::max(1e-8, std::abs(numeric) + std::abs(analytic));
          EXPECT_LT(rel, 1e-3) << "layer " << l << " param " << which << " index " << i;
        }
      }
    }
    // Input gradient too.
    Tensord xp = x;
    for (Eigen::Index i = 0; i < xp.size(); ++i) {
      const double saved = xp.data()[i];
      xp.data()[i] = saved + h;
      const double up = weighted_output(net, xp, w_out);
      xp.data()[i] = saved - h;
      const double down = weighted_output(net, xp, w_out);
      xp.data()[i] = saved;
      EXPECT_NEAR(bwd.input_gradient.data()[i], (up - down) / (2 * h), 1e-6);
    }
  }
}

TEST(InitGlorot, WithinBound) {
  Prng p(5);
  const auto w = init_glorot<float>(30, 20, p);
  const double bound = std::sqrt(6.0 / 50.0);
  EXPECT_LE(w.cwiseAbs().maxCoeff(), bound);
}

TEST(InitGlorot, SameSeedSameMatrix) {
  Prng a(6), b(6);
  EXPECT_EQ(init_glorot<float>(8, 5, a), init_glorot<float>(8, 5, b));
}

TEST(InitGlorot, MeanNearZeroOnLargeMatrix) {
  Prng p(7);
  const auto w = init_glorot<float>(784, 256, p);
  EXPECT_NEAR(w.cast<double>().mean(), 0.0, 0.005);
}

TEST(InitGlorot, RejectsEmptyFan) {
  Prng p(8);
  EXPECT_THROW(init_glorot<float>(0, 3, p), ArgumentError);
}

TEST(MakeDense, ZeroBias) {
  Prng p(9);
  const auto l = make_dense<float>(5, 4, Activation::relu, p);
  EXPECT_EQ(l.bias.cwiseAbs().maxCoeff(), 0.0f);
  EXPECT_EQ(l.parameter_count(), 24u);
}

}  // namespace
}  // namespace movae
