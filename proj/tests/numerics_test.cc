// Copyright 2026 The FM3Q Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <vector>

#include "fm3q/adam.h"
#include "fm3q/dense_net.h"
#include "fm3q/errors.h"
#include "fm3q/finite_diff.h"
#include "gtest/gtest.h"

namespace fm3q {
namespace {

// 2 -> 2 (relu) -> 1 (identity) with hand-picked weights.
struct SmallNet {
  DenseNet net{{2, 2, 1}, {Activation::kRelu, Activation::kIdentity}};
  ParamLayout layout;
  std::vector<double> params;

  SmallNet() {
    net.Register(layout, "f");
    params.assign(layout.size(), 0.0);
    Set("f/w0", {1, -1, 0.5, 2});
    Set("f/b0", {0, -1});
    Set("f/w1", {2, -3});
    Set("f/b1", {0.5});
  }
  void Set(const std::string& name, std::vector<double> v) {
    const ParamBlock& b = layout.Find(name);
    ASSERT_EQ(b.size(), v.size());
    std::copy(v.begin(), v.end(), params.begin() + b.offset);
  }
  double Get(const std::vector<double>& g, const std::string& name, size_t i) const {
    return g[layout.Find(name).offset + i];
  }
};

TEST(DenseNetTest, ForwardByHand) {
  SmallNet s;
  // z0 = [1 - 2, 0.5 + 4 - 1] = [-1, 3.5]; h = [0, 3.5];
  // out = 2 * 0 - 3 * 3.5 + 0.5 = -10.
  const std::vector<double> in = {1, 2};
  EXPECT_EQ(Forward(s.net, s.params, in), std::vector<double>{-10.0});
}

TEST(DenseNetTest, BackwardByHand) {
  SmallNet s;
  const std::vector<double> in = {1, 2};
  Tape tape;
  Forward(s.net, s.params, in, &tape);
  const std::vector<double> up = {1.0};
  const Gradients g = Backward(tape, up);
  EXPECT_EQ(s.Get(g.params, "f/w1", 0), 0.0);
  EXPECT_EQ(s.Get(g.params, "f/w1", 1), 3.5);
  EXPECT_EQ(s.Get(g.params, "f/b1", 0), 1.0);
  // The first hidden unit is off, so only row 1 of w0 gets gradient -3 * x.
  EXPECT_EQ(s.Get(g.params, "f/w0", 0), 0.0);
  EXPECT_EQ(s.Get(g.params, "f/w0", 1), 0.0);
  EXPECT_EQ(s.Get(g.params, "f/w0", 2), -3.0);
  EXPECT_EQ(s.Get(g.params, "f/w0", 3), -6.0);
  EXPECT_EQ(s.Get(g.params, "f/b0", 0), 0.0);
  EXPECT_EQ(s.Get(g.params, "f/b0", 1), -3.0);
  EXPECT_EQ(g.input, (std::vector<double>{-1.5, -6.0}));
}

TEST(DenseNetTest, TapeIsConsumedOnce) {
  SmallNet s;
  const std::vector<double> in = {1, 2};
  const std::vector<double> up = {1.0};
  Tape tape;
  EXPECT_THROW(Backward(tape, up), InvalidArgument);
  Forward(s.net, s.params, in, &tape);
  Backward(tape, up);
  EXPECT_TRUE(tape.consumed());
  EXPECT_THROW(Backward(tape, up), InvalidArgument);
}

TEST(DenseNetTest, RejectsBadInputs) {
  SmallNet s;
  const std::vector<double> wrong = {1, 2, 3};
  const std::vector<double> nan = {1, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(Forward(s.net, s.params, wrong), InvalidArgument);
  EXPECT_THROW(Forward(s.net, s.params, nan), InvalidArgument);
  const DenseNet unregistered({2, 1}, {Activation::kIdentity});
  const std::vector<double> in = {1, 2};
  EXPECT_THROW(Forward(unregistered, s.params, in), InvalidArgument);
}

TEST(DenseNetTest, InitializationRange) {
  DenseNet net({4, 8, 1}, {Activation::kRelu, Activation::kIdentity});
  ParamLayout layout;
  net.Register(layout, "n");
  std::vector<double> p(layout.size());
  Rng rng = DeriveStream(1, streams::kInit);
  net.Initialize(p, rng);
  for (size_t i = 0; i < layout.Find("n/w0").size(); ++i) {
    EXPECT_LE(std::abs(p[layout.Find("n/w0").offset + i]), 0.5);  // 1 / sqrt(4)
  }
  for (size_t i = 0; i < layout.Find("n/w1").size(); ++i) {
    EXPECT_LE(std::abs(p[layout.Find("n/w1").offset + i]), 1.0 / std::sqrt(8.0));
  }
}

TEST(ActivationTest, DerivativeConventions) {
  EXPECT_EQ(ActivationDerivative(Activation::kRelu, 0.0), 0.0);
  EXPECT_EQ(ActivationDerivative(Activation::kRelu, 0.1), 1.0);
  EXPECT_EQ(ActivationDerivative(Activation::kAbs, 0.0), 0.0);
  EXPECT_EQ(ActivationDerivative(Activation::kAbs, -2.0), -1.0);
  EXPECT_DOUBLE_EQ(Activate(Activation::kElu, -1.0), std::exp(-1.0) - 1.0);
  EXPECT_DOUBLE_EQ(ActivationDerivative(Activation::kElu, -1.0), std::exp(-1.0));
  EXPECT_EQ(ActivationDerivative(Activation::kElu, 2.0), 1.0);
  EXPECT_TRUE(HasKink(Activation::kRelu));
  EXPECT_TRUE(HasKink(Activation::kAbs));
  EXPECT_FALSE(HasKink(Activation::kElu));
  for (Activation a : {Activation::kRelu, Activation::kElu, Activation::kAbs,
                       Activation::kIdentity}) {
    EXPECT_EQ(ActivationFromName(ActivationName(a)), a);
  }
}

TEST(ParamVectorTest, JsonRoundTripIsBitExact) {
  SmallNet s;
  s.params[0] = 0.1 + 0.2;  // not representable in short decimal
  s.params[1] = -1e-300;
  ParamVector v{s.layout, s.params};
  const ParamVector back = ParamVector::FromJson(nlohmann::json::parse(v.ToJson().dump()));
  EXPECT_TRUE(back.layout == s.layout);
  EXPECT_EQ(back.values, s.params);
  EXPECT_EQ(back.Block("f/w1")[1], -3.0);
}

TEST(ParamLayoutTest, RejectsGapsAndOverlaps) {
  nlohmann::json doc = SmallNet().layout.ToJson();
  doc[1]["offset"] = doc[1]["offset"].get<int>() + 1;
  EXPECT_THROW(ParamLayout::FromJson(doc), InvalidArgument);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  // Bias correction makes the first step lr * g / (|g| + eps).
  std::vector<double> p = {1.0, -2.0};
  const std::vector<double> g = {2.0, -0.5};
  AdamState state(2);
  AdamOptions o;
  o.lr = 0.1;
  AdamStep(p, g, state, o);
  EXPECT_NEAR(p[0], 1.0 - 0.1 * 2.0 / (2.0 + 1e-8), 1e-15);
  EXPECT_NEAR(p[1], -2.0 + 0.1 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_EQ(state.t, 1);
  EXPECT_NEAR(state.m[0], 0.2, 1e-15);
  EXPECT_NEAR(state.v[0], 0.004, 1e-15);
}

TEST(AdamTest, SecondStepByHand) {
  std::vector<double> p = {0.0};
  AdamState state(1);
  AdamOptions o;
  o.lr = 1.0;
  const std::vector<double> g1 = {1.0};
  const std::vector<double> g2 = {-1.0};
  AdamStep(p, g1, state, o);
  AdamStep(p, g2, state, o);
  // m = 0.9 * 0.1 - 0.1 = -0.01, m_hat = -0.01 / 0.19;
  // v = 0.999 * 0.001 + 0.001 = 0.001999, v_hat = 0.001999 / 0.001999 = 1.
  const double m_hat = -0.01 / (1.0 - 0.81);
  const double step = m_hat / (1.0 + 1e-8);
  EXPECT_NEAR(p[0], -1.0 / (1.0 + 1e-8) - step, 1e-12);
}

TEST(AdamTest, NonFiniteGradientLeavesStateUntouched) {
  std::vector<double> p = {1.0, 2.0};
  AdamState state(2);
  const std::vector<double> g = {0.5, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(AdamStep(p, g, state, {}), NonFiniteError);
  EXPECT_EQ(p, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(state.t, 0);
  EXPECT_EQ(state.m, (std::vector<double>{0.0, 0.0}));
  const std::vector<double> short_g = {0.5};
  EXPECT_THROW(AdamStep(p, short_g, state, {}), InvalidArgument);
}

TEST(AdamTest, StateJsonRoundTrip) {
  std::vector<double> p = {1.0};
  AdamState state(1);
  const std::vector<double> g = {0.3};
  AdamStep(p, g, state, {});
  const AdamState back = AdamState::FromJson(nlohmann::json::parse(state.ToJson().dump()));
  EXPECT_EQ(back.m, state.m);
  EXPECT_EQ(back.v, state.v);
  EXPECT_EQ(back.t, state.t);
}

TEST(AdamTest, DefaultHyperparameters) {
  const AdamOptions o;
  EXPECT_EQ(o.lr, 5e-4);
  EXPECT_EQ(o.beta1, 0.9);
  EXPECT_EQ(o.beta2, 0.999);
}

TEST(FiniteDiffTest, QuadraticIsExact) {
  // f(p) = p0^2 + 3 p0 p1; gradient (2 p0 + 3 p1, 3 p0).
  const ProbeFn fn = [](std::span<const double> p) {
    return Probe{p[0] * p[0] + 3 * p[0] * p[1], {}};
  };
  const std::vector<double> p = {0.7, -1.3};
  const std::vector<double> g = {2 * 0.7 + 3 * -1.3, 3 * 0.7};
  const FiniteDiffReport r = FiniteDiffCheck(fn, p, g, 1e-5);
  EXPECT_EQ(r.compared, 2);
  EXPECT_LT(r.max_relative_error, 1e-8);
  const std::vector<double> wrong = {g[0], g[1] + 0.1};
  EXPECT_GT(FiniteDiffCheck(fn, p, wrong, 1e-5).max_relative_error, 1e-2);
}

TEST(FiniteDiffTest, EpsilonRange) {
  SmallNet s;
  const std::vector<double> in = {1, 2};
  EXPECT_THROW(FiniteDiffCheck(s.net, s.params, in, 1e-9), InvalidArgument);
  EXPECT_THROW(FiniteDiffCheck(s.net, s.params, in, 1e-2), InvalidArgument);
}

TEST(FiniteDiffTest, RandomNetsAwayFromKinks) {
  Rng rng = DeriveStream(3, 0);
  for (Activation hidden : {Activation::kRelu, Activation::kElu, Activation::kAbs}) {
    for (int trial = 0; trial < 5; ++trial) {
      DenseNet net({3, 6, 5, 2}, {hidden, hidden, Activation::kIdentity});
      ParamLayout layout;
      net.Register(layout, "n");
      std::vector<double> p(layout.size());
      net.Initialize(p, rng);
      std::vector<double> in(3);
      for (double& x : in) x = 2.0 * Uniform01(rng) - 1.0;
      const std::vector<double> up = {0.7, -1.1};
      const FiniteDiffReport r = FiniteDiffCheck(net, p, in, 1e-6, up);
      EXPECT_GT(r.compared, 0);
      EXPECT_LE(r.max_relative_error, 1e-4)
          << ActivationName(hidden) << " trial " << trial << " coordinate " << r.worst_index;
    }
  }
}

}  // namespace
}  // namespace fm3q
