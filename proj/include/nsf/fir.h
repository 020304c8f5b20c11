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

// Linear-phase FIR design (Remez exchange) and the fixed low/high-pass bank
// that merges the harmonic and noise branches of the harmonic-plus-noise
// model.

#ifndef NSF_FIR_H_
#define NSF_FIR_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "nsf/graph.h"

namespace nsf::fir {

// A lowpass or highpass specification in Hz.
struct FirSpec {
  std::string name;
  double pass_lo = 0.0, pass_hi = 0.0;
  double stop_lo = 0.0, stop_hi = 0.0;
  double max_ripple_db = 5.0;      // allowed |gain in dB| over the passband
  double min_attenuation_db = 40.0;
  double sample_rate = 16000.0;
  int max_order = 64;

  bool IsLowpass() const { return pass_hi <= stop_lo; }
  // Bands disjoint, inside [0, fs/2], and one of them touches each edge.
  void Validate() const;
};

struct FirCoefficients {
  std::vector<double> taps;
  int order() const { return static_cast<int>(taps.size()) - 1; }
};

struct RemezBand {
  double lo = 0.0, hi = 0.0;  // cycles per sample, within [0, 0.5]
  double desired = 0.0;
  double weight = 1.0;
};

struct RemezResult {
  std::vector<double> taps;
  double deviation = 0.0;  // weighted equiripple error
  int iterations = 0;
  bool converged = false;
};

// Even-order (odd-length, symmetric) minimax design.
RemezResult Remez(int order, const std::vector<RemezBand>& bands, int grid_density = 16);

// Kaiser/Herrmann order estimate, rounded up to an even order >= 2.
int EstimateOrder(const FirSpec& spec);

// |H| in dB at `grid` points uniformly covering [0, fs/2], both ends
// included, evaluated by direct summation.
std::vector<double> FrequencyResponseDb(std::span<const double> taps, int grid);

struct ResponseReport {
  double passband_deviation_db = 0.0;  // max |20 log10 |H|| over the passband
  double passband_peak_to_peak_db = 0.0;
  double stopband_max_db = 0.0;
  bool meets_spec = false;
};

ResponseReport MeasureResponse(std::span<const double> taps, const FirSpec& spec,
                               int grid = 4096);

// Estimate-then-increment by 2 until the measured response meets the spec.
// Throws std::runtime_error if no order up to spec.max_order does.
FirCoefficients DesignEquiripple(const FirSpec& spec);

// Causal convolution with zero initial state, advanced by order/2 samples
// and trimmed to the input length.
template <typename T>
std::vector<T> ApplyFir(std::span<const T> x, std::span<const double> taps);
// Transpose of ApplyFir.
template <typename T>
std::vector<T> ApplyFirAdjoint(std::span<const T> g, std::span<const double> taps);

struct FilterBank {
  enum Index { kVoicedLowpass = 0, kVoicedHighpass, kUnvoicedLowpass, kUnvoicedHighpass };
  std::array<FirSpec, 4> specs;
  std::array<FirCoefficients, 4> filters;

  static std::array<FirSpec, 4> DefaultSpecs(double sample_rate = 16000.0);
  static FilterBank Design(const std::array<FirSpec, 4>& specs);
  static FilterBank Design(double sample_rate = 16000.0) { return Design(DefaultSpecs(sample_rate)); }
};

// Voiced samples take LP_v(harmonic) + HP_v(noise), the others
// LP_u(harmonic) + HP_u(noise).  A sample is voiced when its flag is > 0.5.
std::vector<double> MergeBranches(std::span<const double> harmonic, std::span<const double> noise,
                                  std::span<const double> voiced, const FilterBank& bank);

// Graph version of MergeBranches with operands (harmonic, noise, voiced),
// each T x 1.  The voicing operand gets no gradient.
template <typename T>
ag::NodeId AddFirMerge(ag::Graph<T>& graph, ag::NodeId harmonic, ag::NodeId noise,
                       ag::NodeId voiced, const FilterBank& bank);

}  // namespace nsf::fir

#endif  // NSF_FIR_H_
