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

#include "doctest.h"
#include "nsf/fir.h"
#include "nsf/grad_check.h"
#include "nsf/models.h"
#include "test_util.h"

namespace nsf::model {
namespace {

features::FeatureSequence Features(int64_t frames, int dims, float f0, uint64_t seed) {
  features::FeatureSequence f;
  f.spectral_dims = dims;
  f.f0.assign(static_cast<size_t>(frames), f0);
  const auto v = testing::RandomVector(static_cast<size_t>(frames * dims), seed);
  f.spectral.assign(v.begin(), v.end());
  return f;
}

ModelConfig Tiny(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.blocks = 2;
  c.stages_per_block = 3;
  c.residual_width = 4;
  c.skip_width = 5;
  c.spectral_dims = 3;
  c.lstm_hidden = 2;
  c.condition_width = 4;
  c.upsample = 16;
  c.source.num_harmonics = 2;
  return c;
}

std::vector<float> Output(ModelGraph<float>& g, const ModelInputs<float>& in) {
  const auto v = g.graph.Forward(g.Bind(in)).values();
  return {v.begin(), v.end()};
}

TEST_CASE("condition: one frame gives 80 identical rows") {
  NsfModel<float> m(ModelConfig{}, 1);
  auto g = BuildGraph(m, 1);
  const auto in = PrepareInputs(m, Features(1, 80, 150.0f, 1), 1);
  g.graph.Forward(g.Bind(in));
  const Tensor<float>& c = g.graph.Value(g.condition);
  REQUIRE(c.shape() == Shape{80, 64});
  for (int64_t t = 1; t < 80; ++t) {
    for (int64_t j = 0; j < 64; ++j) CHECK(c.at(t, j) == c.at(0, j));
  }
}

TEST_CASE("condition: zero network passes F0 through the last column") {
  NsfModel<float> m(ModelConfig{}, 1);
  m.ZeroParameters();
  features::FeatureSequence f = Features(100, 80, 200.0f, 2);
  std::fill(f.spectral.begin(), f.spectral.end(), 0.0f);
  auto g = BuildGraph(m, 100);
  g.graph.Forward(g.Bind(PrepareInputs(m, f, 1)));
  const Tensor<float>& c = g.graph.Value(g.condition);
  REQUIRE(c.shape() == Shape{8000, 64});
  for (int64_t t = 0; t < 8000; t += 97) {
    for (int64_t j = 0; j < 63; ++j) CHECK(c.at(t, j) == 0.0f);
    CHECK(c.at(t, 63) == 200.0f);
  }
}

TEST_CASE("zero-parameter blocks are identities") {
  for (ModelKind kind : {ModelKind::kSNsf, ModelKind::kBNsf}) {
    NsfModel<float> m(ModelConfig::Reduced(kind), 1);
    m.ZeroParameters();
    m.params().Find("source.mixer.w")->value[0] = 1.0f;
    GraphOptions o;
    o.keep_block_taps = true;
    auto g = BuildGraph(m, 20, o);
    const auto in = PrepareInputs(m, Features(20, 80, 180.0f, 3), 4);
    const auto y = Output(g, in);
    for (int64_t t = 0; t < 1600; ++t) {
      CHECK(y[static_cast<size_t>(t)] == doctest::Approx(std::tanh(in.harmonics.at(t, 0))).epsilon(1e-6));
    }
  }
}

TEST_CASE("zero-parameter hn-NSF outputs the filter-merged excitation pair") {
  NsfModel<float> m(ModelConfig::Reduced(ModelKind::kHnNsf), 1);
  m.ZeroParameters();
  m.params().Find("source.mixer.w")->value[0] = 1.0f;
  features::FeatureSequence f = Features(20, 80, 180.0f, 5);
  for (size_t b = 10; b < 15; ++b) f.f0[b] = 0.0f;
  auto g = BuildGraph(m, 20);
  const auto in = PrepareInputs(m, f, 6);
  const auto y = Output(g, in);
  std::vector<double> e(1600), n(1600), v(1600);
  for (int64_t t = 0; t < 1600; ++t) {
    e[static_cast<size_t>(t)] = std::tanh(in.harmonics.at(t, 0));
    n[static_cast<size_t>(t)] = in.noise[t];
    v[static_cast<size_t>(t)] = in.voiced[t];
  }
  const auto ref = fir::MergeBranches(e, n, v, m.bank());
  for (size_t t = 0; t < ref.size(); ++t) CHECK(y[t] == doctest::Approx(ref[t]).epsilon(1e-5));
}

TEST_CASE("generation is causal in the excitation") {
  for (ModelKind kind : {ModelKind::kSNsf, ModelKind::kBNsf, ModelKind::kHnNsf}) {
    CAPTURE(KindName(kind));
    NsfModel<float> m(ModelConfig::Reduced(kind), 3);
    auto g = BuildGraph(m, 10);
    auto in = PrepareInputs(m, Features(10, 80, 160.0f, 7), 8);
    const auto base = Output(g, in);
    const int64_t t0 = 500;
    for (int64_t h = 0; h < in.harmonics.cols(); ++h) in.harmonics.at(t0, h) += 0.5f;
    const auto moved = Output(g, in);
    // The merge filters look ahead by half their order.
    const int64_t look = kind == ModelKind::kHnNsf ? 4 : 0;
    for (int64_t t = 0; t < t0 - look; ++t) CHECK(moved[static_cast<size_t>(t)] == base[static_cast<size_t>(t)]);
    CHECK(moved[static_cast<size_t>(t0)] != base[static_cast<size_t>(t0)]);
  }
}

TEST_CASE("tiny models match central differences") {
  for (ModelKind kind : {ModelKind::kSNsf, ModelKind::kBNsf, ModelKind::kHnNsf}) {
    CAPTURE(KindName(kind));
    NsfModel<double> m(Tiny(kind), 5);
    // Move b~ off zero so its gradient path is exercised.
    testing::Randomize(m.params(), 9, 0.4);
    // Raw F0 would saturate the condition and leave gradients at roundoff level.
    m.normalization().f0_mean = 170.0;
    m.normalization().f0_std = 20.0;
    auto g = BuildGraph(m, 4);
    features::FeatureSequence f = Features(4, 3, 170.0f, 10);
    f.f0[3] = 0.0f;
    const auto in = PrepareInputs(m, f, 11);
    ag::GradCheckOptions o;
    o.epsilon = 1e-5;
    const auto r = ag::CheckGraph(g.graph, m.params(), g.Bind(in), o);
    CHECK(r.checked == CountParameters(m));
    CAPTURE(r.worst.tensor);
    // Small recurrent-weight gradients sit near the objective's rounding floor.
    CHECK(r.max_error <= 1e-4);
  }
}

TEST_CASE("parameter counts and ordering") {
  const int64_t s = ExpectedParameterCount(ModelConfig::Reduced(ModelKind::kSNsf));
  const int64_t b = ExpectedParameterCount(ModelConfig::Reduced(ModelKind::kBNsf));
  CHECK(s < b);
  ModelConfig full_s, full_b, full_hn;
  full_s.kind = ModelKind::kSNsf;
  full_b.kind = ModelKind::kBNsf;
  const int64_t ns = ExpectedParameterCount(full_s), nb = ExpectedParameterCount(full_b),
                nh = ExpectedParameterCount(full_hn);
  CHECK(ns < nh);
  CHECK(nh < nb);
  CHECK(std::abs(nb - 1.83e6) <= 0.2 * 1.83e6);
  CHECK(std::abs(ns - 1.07e6) <= 0.2 * 1.07e6);
  CHECK(std::abs(nh - 1.20e6) <= 0.2 * 1.20e6);
  for (const ModelConfig& c : {full_s, full_b, full_hn}) {
    CHECK(CountParameters(NsfModel<float>(c, 1)) == ExpectedParameterCount(c));
  }
}

TEST_CASE("per-layer audit lists each tensor once") {
  const NsfModel<float> m(ModelConfig::Reduced(ModelKind::kSNsf), 1);
  int64_t total = 0, in_layer = 0;
  for (const auto& l : ParameterAudit(m)) {
    total += l.count;
    if (l.name == "block0.in.w" || l.name == "block0.in.b") in_layer += l.count;
  }
  CHECK(in_layer == 128);  // one 1 -> 64 feed-forward layer with bias
  CHECK(total == CountParameters(m));
}

TEST_CASE("hn-NSF has five harmonic blocks and one noise block") {
  NsfModel<float> m(ModelConfig{}, 1);
  const auto g = BuildGraph(m, 2);
  CHECK(g.block_names.size() == 6);
  int noise = 0;
  for (const auto& n : g.block_names) noise += n.rfind("noise_block", 0) == 0;
  CHECK(noise == 1);
}

TEST_CASE("output length and determinism") {
  NsfModel<float> m(ModelConfig::Reduced(ModelKind::kHnNsf), 2);
  auto g = BuildGraph(m, 7);
  const auto f = Features(7, 80, 210.0f, 12);
  const auto a = Output(g, PrepareInputs(m, f, 3));
  const auto b = Output(g, PrepareInputs(m, f, 3));
  CHECK(a.size() == 7 * 80);
  CHECK(a == b);
  CHECK(a != Output(g, PrepareInputs(m, f, 4)));
}

TEST_CASE("b~ starts at zero so the loss is finite at initialisation") {
  NsfModel<float> m(ModelConfig::Reduced(ModelKind::kBNsf), 1);
  for (int i = 0; i < 2; ++i) {
    const auto* w = m.params().Find("block" + std::to_string(i) + ".out.w");
    REQUIRE(w != nullptr);
    for (int64_t r = 0; r < w->value.dim(0); ++r) CHECK(w->value.at(r, 1) == 0.0f);
  }
}

TEST_CASE("feature dimension mismatch is rejected") {
  NsfModel<float> m(ModelConfig::Reduced(ModelKind::kSNsf), 1);
  CHECK_THROWS_AS(PrepareInputs(m, Features(5, 60, 100.0f, 1), 1), std::invalid_argument);
  auto g = BuildGraph(m, 5);
  CHECK_THROWS_AS(g.Bind(PrepareInputs(m, Features(6, 80, 100.0f, 1), 1)), std::invalid_argument);
}

TEST_CASE("kind names round-trip") {
  for (ModelKind k : {ModelKind::kSNsf, ModelKind::kBNsf, ModelKind::kHnNsf}) {
    CHECK(ParseKind(KindName(k)) == k);
  }
  CHECK(ParseKind("HN-NSF") == ModelKind::kHnNsf);
  CHECK_THROWS(ParseKind("wavenet"));
}

}  // namespace
}  // namespace nsf::model
