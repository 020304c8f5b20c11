/* Copyright 2026 The NSF Vocoder Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "nsf/grad_check.h"
#include "nsf/graph.h"
#include "nsf/spectral_loss.h"
#include "test_util.h"

namespace nsf {
namespace {

using ag::Graph;
using ag::ParameterStore;

TEST_CASE("tanh of zero is zero and exp of zero is one") {
  Graph<double> g;
  const auto x = g.Input("x", {1, 1});
  const auto t = g.Tanh(x);
  const auto e = g.Exp(x);
  g.Retain(t);
  g.SetOutput(e);
  const Tensor<double> zero({1, 1}, 0.0);
  CHECK(g.Forward({{"x", &zero}})[0] == 1.0);
  CHECK(g.Value(t)[0] == 0.0);
}

TEST_CASE("zero-weight dilated convolution outputs its bias") {
  ParameterStore<float> p;
  auto& w = p.Add("w", {3, 2, 1});
  auto& b = p.Add("b", {1});
  b.value[0] = 0.5f;
  for (auto pad : {ag::Padding::kCausal, ag::Padding::kSame}) {
    Graph<float> g;
    const auto x = g.Input("x", {16, 2});
    g.Conv1d(x, g.Param(w), g.Param(b), 2, pad);
    const auto in = testing::RandomTensor<float>({16, 2}, 3);
    for (float v : g.Forward({{"x", &in}}).values()) CHECK(v == 0.5f);
  }
}

TEST_CASE("gradient of 2x at 3 is 2, of tanh at 0 is 1") {
  {
    Graph<double> g;
    const auto x = g.Input("x", {1}, true);
    g.Scale(x, 2.0);
    const Tensor<double> v({1}, 3.0);
    CHECK(g.Forward({{"x", &v}})[0] == 6.0);
    g.Backward(Tensor<double>({1}, 1.0));
    CHECK(g.InputGrad(x)[0] == 2.0);
  }
  {
    Graph<double> g;
    const auto x = g.Input("x", {1}, true);
    g.Tanh(x);
    const Tensor<double> v({1}, 0.0);
    g.Forward({{"x", &v}});
    g.Backward(Tensor<double>({1}, 1.0));
    CHECK(g.InputGrad(x)[0] == 1.0);
  }
}

TEST_CASE("tanh scalar graph passes the finite-difference check") {
  Graph<double> g;
  ParameterStore<double> p;
  const auto x = g.Input("x", {1}, true);
  g.Tanh(x);
  const Tensor<double> v({1}, 0.37);
  const auto r = ag::CheckGraph(g, p, {{"x", &v}});
  CHECK(r.checked == 1);
  CHECK(r.max_error <= 1e-7);
}

// Exercises every differentiable op in one graph.
struct Composite {
  ParameterStore<double> p;
  Graph<double> g;
  ag::NodeId x = -1;

  Composite() {
    auto& w1 = p.Add("w1", {3, 8});
    auto& b1 = p.Add("b1", {8});
    auto& wi = p.Add("lstm.wi", {4, 12});
    auto& wr = p.Add("lstm.wr", {3, 12});
    auto& lb = p.Add("lstm.b", {12});
    auto& cw = p.Add("conv.w", {3, 7, 2});
    auto& cb = p.Add("conv.b", {2});
    auto& sw = p.Add("same.w", {3, 2, 1});
    testing::Randomize(p, 11, 0.6);
    x = g.Input("x", {6, 3}, true);
    const auto h = g.Gate(g.MatMul(x, g.Param(w1), g.Param(b1)));            // 6 x 4
    const auto fw = g.Lstm(h, g.Param(wi), g.Param(wr), g.Param(lb), false);  // 6 x 3
    const auto bw = g.Lstm(h, g.Param(wi), g.Param(wr), g.Param(lb), true);
    const auto cat = g.Concat({fw, g.Sigmoid(g.SliceCols(h, 1, 3)), g.Multiply(bw, bw)});
    const auto up = g.Upsample(g.SliceCols(cat, 0, 7), 2);                     // 12 x 7
    const auto c1 = g.Tanh(g.Conv1d(up, g.Param(cw), g.Param(cb), 2, ag::Padding::kCausal));
    const auto c2 = g.Conv1d(c1, g.Param(sw), std::nullopt, 1, ag::Padding::kSame);
    const auto y = g.Add({g.Exp(g.Scale(c2, 0.3)), g.SliceCols(c1, 1, 2)});  // 12 x 1
    g.FrameWindow(y, 4, 2);
  }
};

TEST_CASE("composite graph matches central differences") {
  Composite c;
  const auto in = testing::RandomTensor<double>({6, 3}, 5);
  const auto r = ag::CheckGraph(c.g, c.p, {{"x", &in}});
  CHECK(r.checked == 6 * 3 + c.p.CountElements());
  CHECK(r.max_error <= 1e-5);
}

TEST_CASE("two-layer dilated convolution stack matches central differences") {
  ParameterStore<double> p;
  auto& w1 = p.Add("w1", {3, 1, 4});
  auto& b1 = p.Add("b1", {4});
  auto& w2 = p.Add("w2", {3, 4, 1});
  auto& b2 = p.Add("b2", {1});
  testing::Randomize(p, 2, 0.5);
  Graph<double> g;
  const auto x = g.Input("x", {64, 1}, true);
  const auto h = g.Tanh(g.Conv1d(x, g.Param(w1), g.Param(b1), 1, ag::Padding::kCausal));
  g.Conv1d(h, g.Param(w2), g.Param(b2), 2, ag::Padding::kCausal);
  const auto in = testing::RandomTensor<double>({64, 1}, 9);
  CHECK(ag::CheckGraph(g, p, {{"x", &in}}).max_error <= 1e-5);
}

TEST_CASE("spectral loss node matches central differences") {
  Graph<double> g;
  ParameterStore<double> p;
  const auto gen = g.Input("gen", {400, 1}, true);
  const auto nat = g.Input("nat", {400, 1}, true);
  loss::MultiResLossConfig cfg;
  cfg.configs = {{128, 80, 40}};
  loss::AddSpectralLoss(g, gen, nat, cfg);
  const auto a = testing::RandomTensor<double>({400, 1}, 1, 0.3);
  const auto b = testing::RandomTensor<double>({400, 1}, 2, 0.3);
  ag::GradCheckOptions o;
  o.epsilon = 1e-5;
  const auto r = ag::CheckGraph(g, p, {{"gen", &a}, {"nat", &b}}, o);
  CHECK(r.checked == 800);
  CHECK(r.max_error <= 1e-4);
}

TEST_CASE("backward schedules give bit-identical gradients") {
  Composite c;
  const auto in = testing::RandomTensor<double>({6, 3}, 5);
  const Tensor<double> seed = testing::RandomTensor<double>(c.g.shape(c.g.output()), 8);
  std::vector<std::vector<double>> grads;
  for (auto order : {ag::BackwardOrder::kReverseCreation, ag::BackwardOrder::kDepthFirst}) {
    c.p.ZeroGrad();
    c.g.Forward({{"x", &in}});
    c.g.Backward(seed, order);
    std::vector<double> all(c.g.InputGrad(c.x).values().begin(), c.g.InputGrad(c.x).values().end());
    for (size_t i = 0; i < c.p.size(); ++i) {
      all.insert(all.end(), c.p[i].grad.values().begin(), c.p[i].grad.values().end());
    }
    grads.push_back(all);
  }
  CHECK(grads[0] == grads[1]);
}

TEST_CASE("shape mismatch is reported at declaration with the shapes") {
  Graph<float> g;
  const auto a = g.Input("a", {4, 3});
  const auto b = g.Input("b", {4, 2});
  try {
    g.Add({a, b});
    FAIL("expected a shape error");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[4x3]") != std::string::npos);
    CHECK(msg.find("[4x2]") != std::string::npos);
  }
}

TEST_CASE("released intermediates keep retained nodes and block backward") {
  Graph<float> g;
  const auto x = g.Input("x", {8, 1});
  const auto t = g.Tanh(x);
  g.Retain(t);
  g.Exp(g.Tanh(t));
  const auto in = testing::RandomTensor<float>({8, 1}, 4);
  ag::ForwardOptions o;
  o.release_intermediates = true;
  g.Forward({{"x", &in}}, o);
  CHECK(g.Value(t).size() == 8);
  CHECK_THROWS(g.Backward(Tensor<float>({8, 1}, 1.0f)));
}

TEST_CASE("missing input binding is rejected") {
  Graph<float> g;
  g.Tanh(g.Input("x", {2, 1}));
  CHECK_THROWS_AS(g.Forward({}), std::invalid_argument);
}

TEST_CASE("parameter store cast keeps names and values") {
  ParameterStore<double> p;
  p.Add("a", {2, 2}).value[3] = 1.5;
  const auto q = p.Cast<float>();
  REQUIRE(q.Find("a") != nullptr);
  CHECK(q.Find("a")->value[3] == 1.5f);
  CHECK(q.CountElements() == 4);
}

}  // namespace
}  // namespace nsf
