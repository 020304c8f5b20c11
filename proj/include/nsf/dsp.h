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

// Signal primitives shared by the loss, the feature extractor and the models.
//
// Conventions:
//  - Frame n (0-based) covers samples [n*shift, n*shift + M); samples past the
//    end of the signal are zero.  The number of frames is
//    floor(max(T - M, 0) / shift) + 1, so a short signal still yields one
//    padded frame.  Frame 0 starts at sample 0 (no centering).
//  - The Hann window is symmetric: w[m] = 0.5 * (1 - cos(2*pi*m / (M - 1))).
//  - Dft() computes y_k = sum_m x_m exp(-j 2 pi k m / K) on the frame
//    zero-padded to K points.  Idft() computes b_m = sum_k g_k exp(+j 2 pi k m
//    / K) without the 1/K factor, so Idft(Dft(x)) == K * x.

#ifndef NSF_DSP_H_
#define NSF_DSP_H_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace nsf::dsp {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

struct Waveform {
  std::vector<float> samples;
  double sample_rate = 16000.0;

  int64_t size() const { return static_cast<int64_t>(samples.size()); }
  double seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
  // Throws std::invalid_argument unless samples are finite, the rate is
  // positive and there is at least one sample.
  void Validate() const;
};

struct StftConfig {
  int dft_bins = 512;
  int frame_length = 320;
  int frame_shift = 80;

  // K a power of two, K >= M, 0 < shift <= M.
  void Validate() const;
  bool operator==(const StftConfig&) const = default;
};

bool IsPowerOfTwo(int64_t n);

std::vector<double> HannWindow(int frame_length);

int64_t NumFrames(int64_t num_samples, int frame_length, int frame_shift);

struct FrameMatrix {
  int64_t num_frames = 0;
  int frame_length = 0;
  std::vector<double> values;  // num_frames x frame_length, row-major

  std::span<const double> frame(int64_t n) const {
    return {values.data() + n * frame_length, static_cast<size_t>(frame_length)};
  }
  std::span<double> frame(int64_t n) {
    return {values.data() + n * frame_length, static_cast<size_t>(frame_length)};
  }
};

FrameMatrix FrameAndWindow(std::span<const double> signal, const StftConfig& cfg);

// Adjoint of FrameAndWindow: multiplies every frame by the window and
// scatter-adds it into a signal of `num_samples` samples.  Frames are reduced
// in frame order.  Positions past the signal end are dropped.
std::vector<double> OverlapAddWindowed(const FrameMatrix& frames, int frame_shift,
                                       int64_t num_samples);

Spectrum Dft(std::span<const double> frame, int dft_bins);

// Tolerance is relative to the largest magnitude in `g`.
bool IsConjugateSymmetric(std::span<const Complex> g, double tolerance = 1e-6);

struct IdftResult {
  std::vector<double> values;
  // ||imag|| / ||real|| of the complex inverse transform.
  double imag_residue = 0.0;
};

// Throws std::invalid_argument if `g` is not conjugate symmetric.
IdftResult IdftChecked(std::span<const Complex> g, double tolerance = 1e-6);
std::vector<double> Idft(std::span<const Complex> g, double tolerance = 1e-6);

// Repeats each row of a row-major (num_frames x dims) array `factor` times.
template <typename T>
std::vector<T> UpsampleReplicate(std::span<const T> frames, int64_t dims, int64_t factor);

extern template std::vector<float> UpsampleReplicate(std::span<const float>, int64_t, int64_t);
extern template std::vector<double> UpsampleReplicate(std::span<const double>, int64_t,
                                                      int64_t);

}  // namespace nsf::dsp

#endif  // NSF_DSP_H_
