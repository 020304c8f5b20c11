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

// Sine-based excitation.  Harmonic h (0 = fundamental) of a per-sample F0
// track f is
//   voiced:   alpha * sin(phi_h + sum_{k<=t} 2 pi (h+1) f_k / fs) + n_t
//   unvoiced: alpha / (3 sigma) * n_t
// with n_t ~ N(0, sigma^2).  The phase is integrated in double precision and
// wrapped to [0, 2 pi).  Each harmonic draws its initial phase and noise from
// its own random stream derived from the seed, so components can be produced
// independently.

#ifndef NSF_SOURCE_H_
#define NSF_SOURCE_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "nsf/tensor.h"

namespace nsf::source {

struct SourceConfig {
  double sigma = 0.003;
  double alpha = 0.1;
  int num_harmonics = 7;  // overtones on top of the fundamental
  double sample_rate = 16000.0;

  void Validate() const;
  // (H + 1) * f_max should stay below fs / 4.
  bool NearAliasing(double max_f0) const;
};

// Derives an independent 64-bit seed for stream `index`.
uint64_t StreamSeed(uint64_t seed, uint64_t index);

// Throws std::invalid_argument if (h + 1) * f_t reaches fs / 2.
std::vector<float> HarmonicComponent(std::span<const float> f0, int h, const SourceConfig& cfg,
                                     double phase, std::mt19937_64& rng, bool add_noise = true);

// T x (H + 1) matrix of all components for one generation pass.  Phases are
// uniform in [-pi, pi).  `phases`, if given, receives the drawn phases.
Tensor<float> HarmonicComponents(std::span<const float> f0, const SourceConfig& cfg,
                                 uint64_t seed, bool add_noise = true,
                                 std::vector<double>* phases = nullptr);

// tanh(sum_h w_h e_h + b); reference for the trainable mixer in the models.
std::vector<float> MixExcitations(const Tensor<float>& components, std::span<const double> w,
                                  double bias);

// i.i.d. Gaussian with std alpha / 3.
std::vector<float> NoiseExcitation(int64_t length, const SourceConfig& cfg, uint64_t seed);

}  // namespace nsf::source

#endif  // NSF_SOURCE_H_
