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

#include "nsf/checks.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <numbers>
#include <random>

#include "nsf/source.h"
#include "nsf/spectral_loss.h"

namespace nsf::checks {
namespace {

constexpr double kPi = std::numbers::pi;

long double HannL(int m, int M) {
  if (M == 1) return 1.0L;
  return 0.5L * (1.0L - std::cos(2.0L * std::numbers::pi_v<long double> * m / (M - 1)));
}

// Spectral envelope with three formants, in linear amplitude.
double Envelope(double hz) {
  constexpr double kFormants[3][3] = {{600.0, 120.0, 1.0}, {1400.0, 180.0, 0.5},
                                      {2600.0, 250.0, 0.25}};
  double a = 0.02;
  for (const auto& f : kFormants) {
    const double d = (hz - f[0]) / f[1];
    a += f[2] * std::exp(-0.5 * d * d);
  }
  return a;
}

using LComplex = std::complex<long double>;

// Per frame, the windowed DFT over all K bins.
std::vector<std::vector<LComplex>> DirectSpectra(std::span<const double> x,
                                                 const dsp::StftConfig& cfg) {
  const int64_t T = static_cast<int64_t>(x.size());
  const int K = cfg.dft_bins, M = cfg.frame_length, S = cfg.frame_shift;
  const int64_t N = std::max<int64_t>(T - M, 0) / S + 1;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  std::vector<LComplex> twiddle(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) twiddle[static_cast<size_t>(k)] = std::polar(1.0L, -two_pi * k / K);
  std::vector<std::vector<LComplex>> out(static_cast<size_t>(N),
                                         std::vector<LComplex>(static_cast<size_t>(K)));
  for (int64_t n = 0; n < N; ++n) {
    for (int m = 0; m < M && n * S + m < T; ++m) {
      const long double v = HannL(m, M) * static_cast<long double>(x[static_cast<size_t>(n * S + m)]);
      for (int k = 0; k < K; ++k) {
        out[static_cast<size_t>(n)][static_cast<size_t>(k)] +=
            v * twiddle[static_cast<size_t>((static_cast<int64_t>(k) * m) % K)];
      }
    }
  }
  return out;
}

}  // namespace

long double DirectSpectralDistance(std::span<const double> generated,
                                   std::span<const double> natural,
                                   const dsp::StftConfig& cfg, double eta) {
  if (generated.size() != natural.size()) throw std::invalid_argument("length mismatch");
  const auto y = DirectSpectra(natural, cfg);
  const auto yh = DirectSpectra(generated, cfg);
  const long double e = eta;
  long double sum = 0.0L;
  for (size_t n = 0; n < y.size(); ++n) {
    for (size_t k = 0; k < y[n].size(); ++k) {
      const long double r = std::log((std::norm(y[n][k]) + e) / (std::norm(yh[n][k]) + e));
      sum += r * r;
    }
  }
  return sum / (2.0L * static_cast<long double>(y.size()) * cfg.dft_bins);
}

std::vector<double> FiniteDifferenceSpectralGradient(std::span<const double> generated,
                                                     std::span<const double> natural,
                                                     const dsp::StftConfig& cfg, double eta,
                                                     double epsilon) {
  if (generated.size() != natural.size()) throw std::invalid_argument("length mismatch");
  const auto y = DirectSpectra(natural, cfg);
  const auto yh = DirectSpectra(generated, cfg);
  const int64_t T = static_cast<int64_t>(generated.size());
  const int K = cfg.dft_bins, M = cfg.frame_length, S = cfg.frame_shift;
  const int64_t N = static_cast<int64_t>(y.size());
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double e = eta, h = epsilon;
  std::vector<double> grad(static_cast<size_t>(T), 0.0);
  for (int64_t s = 0; s < T; ++s) {
    long double diff = 0.0L;
    for (int64_t n = 0; n < N; ++n) {
      const int64_t m = s - n * S;
      if (m < 0 || m >= M) continue;
      const long double step = h * HannL(static_cast<int>(m), M);
      for (int k = 0; k < K; ++k) {
        const LComplex d = std::polar(step, -two_pi * static_cast<long double>((k * m) % K) / K);
        const long double p = std::norm(y[static_cast<size_t>(n)][static_cast<size_t>(k)]) + e;
        const LComplex base = yh[static_cast<size_t>(n)][static_cast<size_t>(k)];
        const long double rp = std::log(p / (std::norm(base + d) + e));
        const long double rm = std::log(p / (std::norm(base - d) + e));
        diff += (rp - rm) * (rp + rm);
      }
    }
    grad[static_cast<size_t>(s)] =
        static_cast<double>(diff / (2.0L * h) / (2.0L * static_cast<long double>(N) * K));
  }
  return grad;
}

SyntheticSpeech MakeSyntheticSpeech(double seconds, uint64_t seed, double sample_rate) {
  constexpr int kShift = 80;
  const int64_t frames = static_cast<int64_t>(seconds * sample_rate / kShift);
  const int64_t T = frames * kShift;
  std::mt19937_64 rng(source::StreamSeed(seed, 0x5359));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Alternate 300-500 ms voiced stretches with 60-120 ms unvoiced ones; F0
  // glides between random targets inside each voiced stretch.
  SyntheticSpeech out;
  out.f0.assign(static_cast<size_t>(frames), 0.0f);
  int64_t b = 0;
  bool voiced = uni(rng) < 0.5;
  while (b < frames) {
    const int64_t len = voiced ? 60 + static_cast<int64_t>(uni(rng) * 40)
                               : 12 + static_cast<int64_t>(uni(rng) * 12);
    const int64_t e = std::min(frames, b + len);
    if (voiced) {
      const double f_start = 110.0 + 120.0 * uni(rng);
      const double f_end = 110.0 + 120.0 * uni(rng);
      for (int64_t i = b; i < e; ++i) {
        const double u = static_cast<double>(i - b) / static_cast<double>(std::max<int64_t>(1, e - b - 1));
        out.f0[static_cast<size_t>(i)] = static_cast<float>(f_start + (f_end - f_start) * u);
      }
    }
    b = e;
    voiced = !voiced;
  }

  dsp::Waveform& w = out.utterance.wave;
  w.sample_rate = sample_rate;
  w.samples.assign(static_cast<size_t>(T), 0.0f);
  const double nyq = sample_rate / 2.0;
  std::vector<double> phase(64, 0.0);
  double lp = 0.0;
  for (int64_t t = 0; t < T; ++t) {
    const double f = out.f0[static_cast<size_t>(t / kShift)];
    double v = 0.0;
    if (f > 0.0) {
      for (size_t k = 1; k < phase.size() && k * f < std::min(4000.0, nyq); ++k) {
        phase[k] = std::fmod(phase[k] + 2.0 * kPi * static_cast<double>(k) * f / sample_rate,
                             2.0 * kPi);
        v += Envelope(static_cast<double>(k) * f) * std::sin(phase[k]) / std::sqrt(static_cast<double>(k));
      }
      v *= 0.12;
      v += 0.002 * gauss(rng);
    } else {
      // First-difference noise leans towards high frequencies, like frication.
      const double n = gauss(rng);
      v = 0.04 * (n - lp);
      lp = n;
      std::fill(phase.begin(), phase.end(), 0.0);
    }
    w.samples[static_cast<size_t>(t)] = static_cast<float>(v);
  }
  float peak = 0.0f;
  for (float s : w.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0f) {
    for (float& s : w.samples) s *= 0.5f / peak;
  }

  features::MelConfig mel;
  mel.sample_rate = sample_rate;
  out.utterance.name = "synthetic";
  out.utterance.feat = features::ExtractFeatures(w, mel, out.f0);
  return out;
}

std::vector<dsp::StftConfig> ReducedLossConfigs() {
  // Frame length / shift ratios 4 and 3 as in the default set, and the
  // shortest default configuration unchanged.
  return {{128, 80, 20}, {128, 80, 40}, {256, 240, 80}};
}

std::vector<dsp::StftConfig> LossCheckConfigs() {
  std::vector<dsp::StftConfig> c = ReducedLossConfigs();
  c.push_back({512, 320, 80});
  return c;
}

std::vector<LossCheckReport> CheckSpectralBackward(const std::vector<dsp::StftConfig>& configs,
                                                   int trials, int64_t length, uint64_t seed,
                                                   double epsilon, double eta) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<LossCheckReport> out;
  for (const auto& cfg : configs) {
    LossCheckReport rep;
    rep.config = cfg;
    for (int trial = 0; trial < trials; ++trial) {
      std::vector<double> gen(static_cast<size_t>(length)), nat(static_cast<size_t>(length));
      for (auto& v : gen) v = 0.3 * gauss(rng);
      for (auto& v : nat) v = 0.3 * gauss(rng);
      const std::vector<double> analytic = loss::SpectralDistanceBackward(gen, nat, cfg, eta);
      const std::vector<double> numeric =
          FiniteDifferenceSpectralGradient(gen, nat, cfg, eta, epsilon);
      for (size_t i = 0; i < numeric.size(); ++i) {
        rep.max_error = std::max(rep.max_error, ag::RelativeError(analytic[i], numeric[i]));
      }
      rep.checked += static_cast<int64_t>(numeric.size());
    }
    out.push_back(rep);
  }
  return out;
}

ag::GradCheckResult CheckModelGradient(const model::ModelConfig& config, int64_t frames,
                                       const ag::GradCheckOptions& options, uint64_t seed) {
  model::NsfModel<double> m(config, seed);
  const double seconds =
      static_cast<double>(frames * config.upsample) / config.source.sample_rate;
  SyntheticSpeech speech = MakeSyntheticSpeech(seconds + 0.05, seed, config.source.sample_rate);
  train::Utterance& utt = speech.utterance;
  utt.feat = utt.feat.Slice(0, frames);
  // Guarantee both voicing states inside the checked window.
  for (int64_t b = 0; b < frames; ++b) {
    if (b < frames / 2 && utt.feat.f0[static_cast<size_t>(b)] <= 0.0f) utt.feat.f0[static_cast<size_t>(b)] = 150.0f;
    if (b >= frames / 2 + frames / 4) utt.feat.f0[static_cast<size_t>(b)] = 0.0f;
  }
  utt.feat.spectral_dims = config.spectral_dims;
  utt.feat.spectral.resize(static_cast<size_t>(frames * config.spectral_dims), -3.0f);
  const int64_t T = frames * config.upsample;

  model::GraphOptions gopts;
  gopts.loss = model::LossKind::kSpectral;
  // Every frame of the default configurations would be mostly padding at
  // this length, so the reduced set is used.
  gopts.loss_config.configs = ReducedLossConfigs();
  model::ModelGraph<double> g = model::BuildGraph(m, frames, gopts);
  const model::ModelInputs<double> in = model::PrepareInputs(m, utt.feat, seed, true);
  Tensor<double> target({T, 1});
  for (int64_t t = 0; t < T; ++t) target[t] = utt.wave.samples[static_cast<size_t>(t)];
  return ag::CheckGraph(g.graph, m.params(), g.Bind(in, &target), options);
}

}  // namespace nsf::checks
