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

// Log spectral amplitude distance between a generated and a natural waveform.
//
// For one STFT configuration with N frames and K bins,
//   L = 1/(2NK) sum_n sum_k (log(P_nk + eta) - log(Phat_nk + eta))^2
// where P and Phat are the squared magnitudes of the natural and generated
// spectra.  The gradient is formed in the frequency domain as
//   g_k = dL/dRe(yhat_k) + j dL/dIm(yhat_k),
// brought back with the unnormalized inverse DFT, truncated to the frame
// length, multiplied by the analysis window and overlap-added.

#ifndef NSF_SPECTRAL_LOSS_H_
#define NSF_SPECTRAL_LOSS_H_

#include <span>
#include <string>
#include <vector>

#include "nsf/dsp.h"
#include "nsf/graph.h"

namespace nsf::loss {

struct MultiResLossConfig {
  std::vector<dsp::StftConfig> configs = DefaultConfigs();
  double eta = 1e-5;

  static std::vector<dsp::StftConfig> DefaultConfigs();
  void Validate() const;
};

// "512:320:80;128:80:40" <-> configs.
std::vector<dsp::StftConfig> ParseStftConfigs(const std::string& text);
std::string FormatStftConfigs(const std::vector<dsp::StftConfig>& configs);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d generated
};

double SpectralDistance(std::span<const double> generated, std::span<const double> natural,
                        const dsp::StftConfig& cfg, double eta);

std::vector<double> SpectralDistanceBackward(std::span<const double> generated,
                                             std::span<const double> natural,
                                             const dsp::StftConfig& cfg, double eta);

// Loss and gradient in one pass.
LossAndGrad SpectralDistanceWithGrad(std::span<const double> generated,
                                     std::span<const double> natural,
                                     const dsp::StftConfig& cfg, double eta);

// Per-frame gradient spectra g^(n), before the inverse transform.
std::vector<dsp::Spectrum> GradientSpectra(std::span<const double> generated,
                                           std::span<const double> natural,
                                           const dsp::StftConfig& cfg, double eta);

// Sum of the per-configuration losses and gradients.
LossAndGrad MultiResLoss(std::span<const double> generated, std::span<const double> natural,
                         const MultiResLossConfig& cfg);

// (1/T) sum (natural - generated)^2 and its gradient.
double WaveformMse(std::span<const double> generated, std::span<const double> natural);
LossAndGrad WaveformMseWithGrad(std::span<const double> generated,
                                std::span<const double> natural);

// Graph nodes with a 1-element output.  Both operands are T x 1; gradients
// flow to either.
template <typename T>
ag::NodeId AddSpectralLoss(ag::Graph<T>& graph, ag::NodeId generated, ag::NodeId natural,
                           const MultiResLossConfig& cfg);
template <typename T>
ag::NodeId AddWaveformMse(ag::Graph<T>& graph, ag::NodeId generated, ag::NodeId natural);

}  // namespace nsf::loss

#endif  // NSF_SPECTRAL_LOSS_H_
