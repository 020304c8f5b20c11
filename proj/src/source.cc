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

#include "nsf/source.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nsf::source {

void SourceConfig::Validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (num_harmonics < 0) throw std::invalid_argument("num_harmonics must be >= 0");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be positive");
}

bool SourceConfig::NearAliasing(double max_f0) const {
  return (num_harmonics + 1) * max_f0 >= sample_rate / 4.0;
}

uint64_t StreamSeed(uint64_t seed, uint64_t index) {
  // splitmix64 finalizer over a mixed key.
  uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<float> HarmonicComponent(std::span<const float> f0, int h, const SourceConfig& cfg,
                                     double phase, std::mt19937_64& rng, bool add_noise) {
  cfg.Validate();
  if (h < 0) throw std::invalid_argument("harmonic index must be >= 0");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double mult = static_cast<double>(h + 1);
  const double nyquist = cfg.sample_rate / 2.0;
  std::normal_distribution<double> noise(0.0, cfg.sigma);
  const double unvoiced_gain = cfg.alpha / (3.0 * cfg.sigma);

  std::vector<float> out(f0.size());
  double acc = 0.0;
  for (size_t t = 0; t < f0.size(); ++t) {
    const double f = f0[t];
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw std::invalid_argument("F0 must be finite and >= 0 at sample " + std::to_string(t));
    }
    if (mult * f >= nyquist) {
      throw std::invalid_argument("harmonic " + std::to_string(h) + " of F0 " +
                                  std::to_string(f) + " Hz aliases at " +
                                  std::to_string(cfg.sample_rate) + " Hz sampling");
    }
    // Draw noise unconditionally so the stream does not depend on voicing.
    const double n = noise(rng);
    acc = std::fmod(acc + kTwoPi * mult * f / cfg.sample_rate, kTwoPi);
    double v;
    if (f > 0.0) {
      v = cfg.alpha * std::sin(acc + phase) + (add_noise ? n : 0.0);
    } else {
      v = add_noise ? unvoiced_gain * n : 0.0;
    }
    out[t] = static_cast<float>(v);
  }
  return out;
}

Tensor<float> HarmonicComponents(std::span<const float> f0, const SourceConfig& cfg,
                                 uint64_t seed, bool add_noise, std::vector<double>* phases) {
  cfg.Validate();
  const int64_t T = static_cast<int64_t>(f0.size());
  const int64_t C = cfg.num_harmonics + 1;
  Tensor<float> out({T, C});
  if (phases) phases->assign(static_cast<size_t>(C), 0.0);
  for (int64_t h = 0; h < C; ++h) {
    std::mt19937_64 rng(StreamSeed(seed, static_cast<uint64_t>(h)));
    std::uniform_real_distribution<double> uni(-std::numbers::pi, std::numbers::pi);
    const double phi = uni(rng);
    if (phases) (*phases)[static_cast<size_t>(h)] = phi;
    const std::vector<float> e = HarmonicComponent(f0, static_cast<int>(h), cfg, phi, rng,
                                                   add_noise);
    for (int64_t t = 0; t < T; ++t) out.at(t, h) = e[static_cast<size_t>(t)];
  }
  return out;
}

std::vector<float> MixExcitations(const Tensor<float>& components, std::span<const double> w,
                                  double bias) {
  if (components.rank() != 2 || components.dim(1) != static_cast<int64_t>(w.size())) {
    throw std::invalid_argument("mixer weight count differs from component count");
  }
  std::vector<float> out(static_cast<size_t>(components.dim(0)));
  for (int64_t t = 0; t < components.dim(0); ++t) {
    double s = bias;
    for (size_t h = 0; h < w.size(); ++h) s += w[h] * components.at(t, static_cast<int64_t>(h));
    out[static_cast<size_t>(t)] = static_cast<float>(std::tanh(s));
  }
  return out;
}

std::vector<float> NoiseExcitation(int64_t length, const SourceConfig& cfg, uint64_t seed) {
  cfg.Validate();
  if (length < 1) throw std::invalid_argument("noise length must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, cfg.alpha / 3.0);
  std::vector<float> out(static_cast<size_t>(length));
  for (auto& v : out) v = static_cast<float>(noise(rng));
  return out;
}

}  // namespace nsf::source
