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

// Frame-rate acoustic features and their on-disk format.
//
// Files are raw little-endian float32, frame-major, with `1 + D` values per
// frame: F0 in Hz (0 = unvoiced) first, then the D spectral values.

#ifndef NSF_FEATURES_H_
#define NSF_FEATURES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nsf/dsp.h"

namespace nsf::features {

struct FeatureSequence {
  std::vector<float> f0;        // B values
  std::vector<float> spectral;  // B x spectral_dims, row-major
  int spectral_dims = 80;
  double frame_shift_ms = 5.0;

  int64_t num_frames() const { return static_cast<int64_t>(f0.size()); }
  // B >= 1, F0 finite and >= 0, spectral block sized B x D and finite.
  void Validate() const;
  // Frames [begin, end).
  FeatureSequence Slice(int64_t begin, int64_t end) const;
};

void WriteFeatures(const std::string& path, const FeatureSequence& feat);
// `dims` is the per-frame value count including F0 (1 + D).
FeatureSequence ReadFeatures(const std::string& path, int dims);

struct MelConfig {
  double sample_rate = 16000.0;
  dsp::StftConfig stft{512, 320, 80};
  int num_bands = 80;
  double min_hz = 0.0;
  double max_hz = 8000.0;
  double floor = 1e-5;  // amplitude floor before the log
};

// num_bands x (dft_bins / 2 + 1) triangular weights on the HTK mel scale.
std::vector<std::vector<double>> MelFilterbank(const MelConfig& cfg);
// Index of the band whose peak is closest to `hz`.
int MelBandForFrequency(const MelConfig& cfg, double hz);

// log(max(mel-weighted magnitude, floor)) for every frame of `w` framed as in
// dsp::FrameAndWindow, i.e. B = floor(max(T - M, 0) / shift) + 1 rows.
std::vector<float> ExtractMelSpectrogram(const dsp::Waveform& w, const MelConfig& cfg);

// Full pipeline used by the `extract` tool.  The signal is padded by
// (M - shift) / 2 samples on both sides so that B = floor(T / shift) and
// frame b is centred on samples [b * shift, (b + 1) * shift).  F0 comes from
// `f0` if non-empty (length B), otherwise from the built-in tracker.
FeatureSequence ExtractFeatures(const dsp::Waveform& w, const MelConfig& cfg,
                                std::span<const float> f0 = {});

}  // namespace nsf::features

#endif  // NSF_FEATURES_H_
