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
#include <numbers>
#include <random>

#include "doctest.h"
#include "nsf/grad_check.h"
#include "nsf/source.h"
#include "nsf/spectral_loss.h"
#include "test_util.h"

namespace nsf::source {
namespace {

constexpr double kPi = std::numbers::pi;

double Std(std::span<const float> v) {
  double m = 0.0, s = 0.0;
  for (float x : v) m += x;
  m /= static_cast<double>(v.size());
  for (float x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

TEST_CASE("unvoiced component has std alpha / 3") {
  const SourceConfig cfg;
  const std::vector<float> f0(16000, 0.0f);
  std::mt19937_64 rng(1);
  const auto e = HarmonicComponent(f0, 0, cfg, 0.0, rng);
  CHECK(std::abs(Std(e) - cfg.alpha / 3.0) <= 0.1 * cfg.alpha / 3.0);
}

TEST_CASE("constant 100 Hz without noise is a closed-form sine") {
  const SourceConfig cfg;
  const std::vector<float> f0(1600, 100.0f);
  std::mt19937_64 rng(1);
  const auto e = HarmonicComponent(f0, 0, cfg, 0.0, rng, false);
  for (size_t i = 0; i < e.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    CHECK(e[i] == doctest::Approx(0.1 * std::sin(2.0 * kPi * 100.0 * t / 16000.0)).epsilon(1e-6));
  }
}

TEST_CASE("phase stays continuous across an F0 step") {
  const SourceConfig cfg;
  std::vector<float> f0(16000, 100.0f);
  for (size_t i = 8000; i < f0.size(); ++i) f0[i] = 200.0f;
  std::mt19937_64 rng(3);
  const auto e = HarmonicComponent(f0, 0, cfg, 0.4, rng, false);
  const double bound = cfg.alpha * 2.0 * kPi * 200.0 / cfg.sample_rate;
  double worst = 0.0;
  for (size_t i = 1; i < e.size(); ++i) worst = std::max(worst, std::abs(double(e[i]) - e[i - 1]));
  CHECK(worst <= bound + 1e-6);
  // With noise, around the step itself.
  std::mt19937_64 rng2(3);
  const auto en = HarmonicComponent(f0, 0, cfg, 0.4, rng2, true);
  for (size_t i = 7990; i < 8010; ++i) {
    CHECK(std::abs(double(en[i]) - en[i - 1]) <= bound + 4.0 * cfg.sigma);
  }
}

TEST_CASE("harmonic components use independent seeded phases") {
  SourceConfig cfg;
  const std::vector<float> f0(800, 150.0f);
  std::vector<double> phases;
  const Tensor<float> a = HarmonicComponents(f0, cfg, 7, true, &phases);
  const Tensor<float> b = HarmonicComponents(f0, cfg, 7, true);
  CHECK(a.shape() == Shape{800, 8});
  CHECK(std::vector<float>(a.values().begin(), a.values().end()) ==
        std::vector<float>(b.values().begin(), b.values().end()));
  REQUIRE(phases.size() == 8);
  for (double p : phases) CHECK((p >= -kPi && p < kPi));
  CHECK(phases[0] != phases[1]);
  const Tensor<float> c = HarmonicComponents(f0, cfg, 8, true);
  CHECK(c[0] != a[0]);
}

TEST_CASE("harmonics at or above Nyquist are rejected") {
  SourceConfig cfg;
  const std::vector<float> f0(10, 1000.0f);
  CHECK_THROWS_AS(HarmonicComponents(f0, cfg, 1), std::invalid_argument);
  cfg.num_harmonics = 6;  // 7 kHz is still below 8 kHz
  CHECK_NOTHROW(HarmonicComponents(f0, cfg, 1));
  CHECK(cfg.NearAliasing(1000.0));
  CHECK_FALSE(cfg.NearAliasing(400.0));
}

TEST_CASE("mixer identities") {
  SourceConfig cfg;
  cfg.num_harmonics = 0;
  const std::vector<float> f0(200, 120.0f);
  const Tensor<float> e = HarmonicComponents(f0, cfg, 2);
  const std::vector<double> one = {1.0}, zero = {0.0};
  const auto m1 = MixExcitations(e, one, 0.0);
  for (int64_t t = 0; t < 200; ++t) CHECK(m1[static_cast<size_t>(t)] == doctest::Approx(std::tanh(e[t])));
  for (float v : MixExcitations(e, zero, 0.0)) CHECK(v == 0.0f);
}

TEST_CASE("mixer weight gradient matches central differences") {
  SourceConfig cfg;
  const std::vector<float> f0(400, 180.0f);
  const Tensor<double> e = HarmonicComponents(f0, cfg, 4).Cast<double>();
  ag::ParameterStore<double> p;
  auto& w = p.Add("w", {8, 1});
  auto& b = p.Add("b", {1});
  testing::Randomize(p, 3, 1.0);
  ag::Graph<double> g;
  const auto h = g.Input("h", {400, 8});
  const auto target = g.Input("target", {400, 1});
  const auto mix = g.Tanh(g.MatMul(h, g.Param(w), g.Param(b)));
  loss::MultiResLossConfig lc;
  lc.configs = {{128, 80, 40}};
  loss::AddSpectralLoss(g, mix, target, lc);
  const auto tgt = testing::RandomTensor<double>({400, 1}, 5, 0.1);
  ag::GradCheckOptions o;
  o.epsilon = 1e-6;
  const auto r = ag::CheckGraph(g, p, {{"h", &e}, {"target", &tgt}}, o);
  CHECK(r.checked == 9);
  CHECK(r.max_error <= 1e-5);
}

TEST_CASE("noise excitation statistics and determinism") {
  const SourceConfig cfg;
  const auto n = NoiseExcitation(160000, cfg, 11);
  CHECK(n == NoiseExcitation(160000, cfg, 11));
  const double target = cfg.alpha / 3.0;
  CHECK(std::abs(Std(n) - target) <= 0.05 * target);
  double mean = 0.0;
  for (float v : n) mean += v;
  mean /= static_cast<double>(n.size());
  CHECK(std::abs(mean) <= 3.0 * target / std::sqrt(160000.0));
}

TEST_CASE("stream seeds differ per index") {
  CHECK(StreamSeed(1, 0) != StreamSeed(1, 1));
  CHECK(StreamSeed(1, 0) != StreamSeed(2, 0));
  CHECK(StreamSeed(5, 3) == StreamSeed(5, 3));
}

}  // namespace
}  // namespace nsf::source
