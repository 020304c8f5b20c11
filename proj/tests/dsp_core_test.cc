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
#include "nsf/dsp.h"
#include "nsf/pitch.h"
#include "test_util.h"

namespace nsf::dsp {
namespace {

constexpr double kPi = std::numbers::pi;

TEST_CASE("frame counts follow floor((T - M) / shift) + 1") {
  CHECK(NumFrames(10, 4, 2) == 4);
  CHECK(NumFrames(3, 4, 2) == 1);
  CHECK(NumFrames(400, 320, 80) == 2);
  const std::vector<double> x = {1.0, 2.0, 3.0};
  const FrameMatrix fm = FrameAndWindow(x, {4, 4, 2});
  REQUIRE(fm.num_frames == 1);
  CHECK(fm.frame(0)[3] == 0.0);  // zero-padded tail
}

TEST_CASE("Hann window on an all-ones frame") {
  const std::vector<double> ones(4, 1.0);
  const FrameMatrix fm = FrameAndWindow(ones, {4, 4, 4});
  CHECK(fm.frame(0)[0] == doctest::Approx(0.0));
  CHECK(fm.frame(0)[1] == doctest::Approx(0.75));
  CHECK(fm.frame(0)[2] == doctest::Approx(0.75));
  CHECK(fm.frame(0)[3] == doctest::Approx(0.0));
}

TEST_CASE("overlap-add is the adjoint of framing") {
  const StftConfig cfg{16, 12, 5};
  const auto x = testing::RandomVector(47, 1);
  const FrameMatrix fm = FrameAndWindow(x, cfg);
  FrameMatrix r = fm;
  const auto rv = testing::RandomVector(r.values.size(), 2);
  r.values = rv;
  double lhs = 0.0, rhs = 0.0;
  for (size_t i = 0; i < fm.values.size(); ++i) lhs += fm.values[i] * rv[i];
  const auto back = OverlapAddWindowed(r, cfg.frame_shift, 47);
  for (size_t i = 0; i < x.size(); ++i) rhs += x[i] * back[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("DFT of zeros and of a unit impulse") {
  const std::vector<double> zeros(8, 0.0);
  for (const auto& y : Dft(zeros, 16)) CHECK(std::abs(y) == 0.0);
  const std::vector<double> delta = {1.0, 0.0, 0.0, 0.0};
  for (const auto& y : Dft(delta, 8)) {
    CHECK(y.real() == doctest::Approx(1.0));
    CHECK(y.imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("DFT matches direct summation") {
  const auto x = testing::RandomVector(320, 3);
  const Spectrum y = Dft(x, 512);
  const auto ref = testing::DirectDft(x, 512);
  double worst = 0.0, scale = 0.0;
  for (size_t k = 0; k < y.size(); ++k) {
    const std::complex<double> r(static_cast<double>(ref[k].real()),
                                 static_cast<double>(ref[k].imag()));
    worst = std::max(worst, std::abs(y[k] - r));
    scale = std::max(scale, std::abs(r));
  }
  CHECK(worst / scale <= 1e-6);
  // Conjugate symmetry of a real frame.
  CHECK(IsConjugateSymmetric(y));
  CHECK(y[0].imag() == doctest::Approx(0.0));
  CHECK(y[256].imag() == doctest::Approx(0.0));
}

TEST_CASE("inverse DFT is unnormalized: idft(dft(x)) = K x") {
  const auto x = testing::RandomVector(64, 4);
  const auto back = Idft(Dft(x, 64));
  REQUIRE(back.size() == 64);
  for (size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(64.0 * x[i]));
  const Spectrum zero(32, Complex(0.0, 0.0));
  for (double v : Idft(zero)) CHECK(v == 0.0);
}

TEST_CASE("inverse DFT of a conjugate-symmetric spectrum matches direct summation") {
  const int K = 128;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  Spectrum s(K);
  s[0] = Complex(g(rng), 0.0);
  s[K / 2] = Complex(g(rng), 0.0);
  for (int k = 1; k < K / 2; ++k) {
    s[static_cast<size_t>(k)] = Complex(g(rng), g(rng));
    s[static_cast<size_t>(K - k)] = std::conj(s[static_cast<size_t>(k)]);
  }
  const IdftResult r = IdftChecked(s);
  CHECK(r.imag_residue <= 1e-10);
  for (int t = 0; t < K; ++t) {
    long double ref = 0.0L;
    for (int k = 0; k < K; ++k) {
      const long double a = 2.0L * std::numbers::pi_v<long double> * ((k * t) % K) / K;
      ref += s[static_cast<size_t>(k)].real() * std::cos(a) - s[static_cast<size_t>(k)].imag() * std::sin(a);
    }
    CHECK(std::abs(r.values[static_cast<size_t>(t)] - static_cast<double>(ref)) <= 1e-9);
  }
}

TEST_CASE("inverse DFT rejects a spectrum without conjugate symmetry") {
  Spectrum s(8, Complex(0.0, 0.0));
  s[1] = Complex(1.0, 1.0);
  CHECK_THROWS_AS(Idft(s), std::invalid_argument);
}

TEST_CASE("frame-rate upsampling replicates rows") {
  const std::vector<float> ab = {1.0f, 2.0f};
  CHECK(UpsampleReplicate<float>(ab, 1, 3) == std::vector<float>{1, 1, 1, 2, 2, 2});
  CHECK(UpsampleReplicate<float>(ab, 1, 1) == ab);
  CHECK(UpsampleReplicate<float>(ab, 1, 80).size() == 160);
}

TEST_CASE("pitch of a 200 Hz sine, white noise and silence") {
  Waveform sine;
  sine.samples.resize(16000);
  for (size_t t = 0; t < sine.samples.size(); ++t) {
    sine.samples[t] = static_cast<float>(0.5 * std::sin(2.0 * kPi * 200.0 * t / 16000.0));
  }
  const auto f0 = EstimateF0(sine, 80);
  REQUIRE(f0.size() == 200);
  for (size_t b = 5; b + 5 < f0.size(); ++b) CHECK(std::abs(f0[b] - 200.0) <= 1.0);

  Waveform noise;
  const auto n = testing::RandomVector(16000, 6, 0.3);
  noise.samples.assign(n.begin(), n.end());
  int unvoiced = 0;
  const auto fn = EstimateF0(noise, 80);
  for (double v : fn) unvoiced += v == 0.0;
  CHECK(unvoiced >= 0.9 * static_cast<double>(fn.size()));

  Waveform silence;
  silence.samples.assign(8000, 0.0f);
  for (double v : EstimateF0(silence, 80)) CHECK(v == 0.0);
}

TEST_CASE("STFT configuration validation") {
  CHECK_NOTHROW(StftConfig{512, 320, 80}.Validate());
  CHECK_THROWS(StftConfig{500, 320, 80}.Validate());
  CHECK_THROWS(StftConfig{256, 320, 80}.Validate());
  CHECK_THROWS(StftConfig{512, 320, 0}.Validate());
}

}  // namespace
}  // namespace nsf::dsp
