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

// Waveform generation and generation-speed measurement.  Generation is a
// single forward pass over the whole utterance; no output sample feeds back
// into the network.

#ifndef NSF_SYNTHESIS_H_
#define NSF_SYNTHESIS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nsf/dsp.h"
#include "nsf/features.h"
#include "nsf/models.h"

namespace nsf::synth {

struct SynthOptions {
  uint64_t seed = 1;
  bool add_noise = true;
  // Also return the output of every filter block.
  bool dump_blocks = false;
};

struct TimingReport {
  double build_seconds = 0.0;    // graph declaration
  double prepare_seconds = 0.0;  // excitation and input preparation
  double forward_seconds = 0.0;
  double total_seconds = 0.0;
  int64_t samples = 0;
  double samples_per_second = 0.0;
};

struct SynthResult {
  dsp::Waveform wave;
  std::vector<std::pair<std::string, std::vector<float>>> blocks;
  TimingReport timing;
};

// Throws std::invalid_argument on a feature/model dimension mismatch.
template <typename T>
SynthResult Synthesize(model::NsfModel<T>& model, const features::FeatureSequence& feat,
                       const SynthOptions& options = {});

// Voiced features with a constant F0 and a flat spectrum, for benchmarks.
features::FeatureSequence BenchFeatures(double seconds, const model::ModelConfig& config,
                                        double f0_hz = 200.0);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
// Least squares y = slope * x + intercept.  Needs >= 2 distinct x.
LinearFit FitLine(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingPoint {
  double seconds = 0.0;  // audio duration
  int64_t samples = 0;
  double wall_seconds = 0.0;  // median over repeats
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  LinearFit fit;  // wall seconds against samples
  double samples_per_second = 0.0;  // at the longest duration
};

ScalingReport BenchScaling(model::NsfModel<float>& model, const std::vector<double>& durations,
                           int repeats, uint64_t seed = 1);

std::string FormatTiming(const TimingReport& t);
std::string FormatScaling(const ScalingReport& r);

}  // namespace nsf::synth

#endif  // NSF_SYNTHESIS_H_
