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

// Reusable diagnostic suites and synthetic material shared by the command
// line tool and the tests.

#ifndef NSF_CHECKS_H_
#define NSF_CHECKS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nsf/grad_check.h"
#include "nsf/models.h"
#include "nsf/train.h"

namespace nsf::checks {

// A speech-like utterance with a known F0 track: formant-shaped harmonics
// on voiced stretches separated by short noise bursts.  Features are
// extracted from the waveform with the known F0 substituted.
struct SyntheticSpeech {
  train::Utterance utterance;
  std::vector<float> f0;  // per frame, 0 = unvoiced
};

SyntheticSpeech MakeSyntheticSpeech(double seconds, uint64_t seed, double sample_rate = 16000.0);

// Single-resolution configurations used for backward checks on short
// signals: the default shapes at reduced frame length and the 128:80:40
// one at full size.
std::vector<dsp::StftConfig> ReducedLossConfigs();
// ReducedLossConfigs() plus the 512:320:80 default, for the loss checks.
std::vector<dsp::StftConfig> LossCheckConfigs();

// Independent long-double reference for the spectral distance: direct DFT
// sums over every frame and all K bins.
long double DirectSpectralDistance(std::span<const double> generated,
                                   std::span<const double> natural,
                                   const dsp::StftConfig& cfg, double eta);

// Central differences of DirectSpectralDistance with respect to every
// generated sample.  A perturbation of one sample changes each affected
// bin by a closed-form term, so only those bins are re-evaluated and the
// difference is formed without cancelling against the full loss.
std::vector<double> FiniteDifferenceSpectralGradient(std::span<const double> generated,
                                                     std::span<const double> natural,
                                                     const dsp::StftConfig& cfg, double eta,
                                                     double epsilon);

struct LossCheckReport {
  dsp::StftConfig config;
  double max_error = 0.0;
  int64_t checked = 0;
};

// Spectral distance backward against central differences on random
// waveform pairs.
std::vector<LossCheckReport> CheckSpectralBackward(const std::vector<dsp::StftConfig>& configs,
                                                   int trials, int64_t length, uint64_t seed,
                                                   double epsilon = 1e-6, double eta = 1e-5);

// Gradient of the multi-resolution loss with respect to every parameter of
// a randomly initialised double-precision model, on `frames` frames of
// synthetic speech.
ag::GradCheckResult CheckModelGradient(const model::ModelConfig& config, int64_t frames,
                                       const ag::GradCheckOptions& options, uint64_t seed = 1);

}  // namespace nsf::checks

#endif  // NSF_CHECKS_H_
