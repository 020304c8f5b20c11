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

#include "nsf/dsp.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.h"

namespace nsf::dsp {

void Waveform::Validate() const {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("waveform sample rate must be positive");
  if (samples.empty()) throw std::invalid_argument("waveform has no samples");
  for (float s : samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("waveform contains non-finite samples");
  }
}

bool IsPowerOfTwo(int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

void StftConfig::Validate() const {
  if (!IsPowerOfTwo(dft_bins)) {
    throw std::invalid_argument("dft_bins must be a power of two, got " +
                                std::to_string(dft_bins));
  }
  if (frame_length < 1 || dft_bins < frame_length) {
    throw std::invalid_argument("frame_length must be in [1, dft_bins], got " +
                                std::to_string(frame_length));
  }
  if (frame_shift < 1 || frame_shift > frame_length) {
    throw std::invalid_argument("frame_shift must be in [1, frame_length], got " +
                                std::to_string(frame_shift));
  }
}

std::vector<double> HannWindow(int frame_length) {
  std::vector<double> w(static_cast<size_t>(frame_length), 1.0);
  if (frame_length == 1) return w;
  const double denom = static_cast<double>(frame_length - 1);
  for (int m = 0; m < frame_length; ++m) {
    w[static_cast<size_t>(m)] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * m / denom));
  }
  return w;
}

int64_t NumFrames(int64_t num_samples, int frame_length, int frame_shift) {
  return std::max<int64_t>(num_samples - frame_length, 0) / frame_shift + 1;
}

FrameMatrix FrameAndWindow(std::span<const double> signal, const StftConfig& cfg) {
  cfg.Validate();
  const int64_t T = static_cast<int64_t>(signal.size());
  const int M = cfg.frame_length;
  FrameMatrix fm;
  fm.num_frames = NumFrames(T, M, cfg.frame_shift);
  fm.frame_length = M;
  fm.values.assign(static_cast<size_t>(fm.num_frames * M), 0.0);
  const auto w = HannWindow(M);
  for (int64_t n = 0; n < fm.num_frames; ++n) {
    const int64_t start = n * cfg.frame_shift;
    const int64_t avail = std::clamp<int64_t>(T - start, 0, M);
    auto frame = fm.frame(n);
    for (int64_t m = 0; m < avail; ++m) {
      frame[static_cast<size_t>(m)] = w[static_cast<size_t>(m)] * signal[static_cast<size_t>(start + m)];
    }
  }
  return fm;
}

std::vector<double> OverlapAddWindowed(const FrameMatrix& frames, int frame_shift,
                                       int64_t num_samples) {
  std::vector<double> out(static_cast<size_t>(num_samples), 0.0);
  const auto w = HannWindow(frames.frame_length);
  for (int64_t n = 0; n < frames.num_frames; ++n) {
    const int64_t start = n * frame_shift;
    const int64_t avail = std::clamp<int64_t>(num_samples - start, 0, frames.frame_length);
    auto frame = frames.frame(n);
    for (int64_t m = 0; m < avail; ++m) {
      out[static_cast<size_t>(start + m)] += w[static_cast<size_t>(m)] * frame[static_cast<size_t>(m)];
    }
  }
  return out;
}

Spectrum Dft(std::span<const double> frame, int dft_bins) {
  if (!IsPowerOfTwo(dft_bins)) throw std::invalid_argument("dft_bins must be a power of two");
  if (static_cast<int64_t>(frame.size()) > dft_bins) {
    throw std::invalid_argument("frame longer than dft_bins");
  }
  Spectrum in(static_cast<size_t>(dft_bins), Complex(0.0, 0.0));
  for (size_t m = 0; m < frame.size(); ++m) in[m] = Complex(frame[m], 0.0);
  Spectrum out(static_cast<size_t>(dft_bins));
  internal::FftForward(in.data(), out.data(), dft_bins);
  // Real input: DC and Nyquist bins are real, and the upper half mirrors the
  // lower half exactly.
  const size_t K = static_cast<size_t>(dft_bins);
  out[0].imag(0.0);
  if (K > 1) {
    out[K / 2].imag(0.0);
    for (size_t k = 1; k < K / 2; ++k) out[K - k] = std::conj(out[k]);
  }
  return out;
}

bool IsConjugateSymmetric(std::span<const Complex> g, double tolerance) {
  const size_t K = g.size();
  if (K == 0) return true;
  double scale = 0.0;
  for (const auto& v : g) scale = std::max(scale, std::abs(v));
  const double tol = tolerance * scale + 1e-300;
  if (std::abs(g[0].imag()) > tol) return false;
  if (K % 2 == 0 && std::abs(g[K / 2].imag()) > tol) return false;
  for (size_t k = 1; k < (K + 1) / 2; ++k) {
    if (std::abs(g[k] - std::conj(g[K - k])) > tol) return false;
  }
  return true;
}

IdftResult IdftChecked(std::span<const Complex> g, double tolerance) {
  if (!IsPowerOfTwo(static_cast<int64_t>(g.size()))) {
    throw std::invalid_argument("inverse DFT length must be a power of two");
  }
  if (!IsConjugateSymmetric(g, tolerance)) {
    throw std::invalid_argument("inverse DFT input is not conjugate symmetric");
  }
  const int K = static_cast<int>(g.size());
  Spectrum out(g.size());
  internal::FftBackward(g.data(), out.data(), K);
  IdftResult r;
  r.values.resize(g.size());
  double re2 = 0.0, im2 = 0.0;
  for (size_t m = 0; m < g.size(); ++m) {
    r.values[m] = out[m].real();
    re2 += out[m].real() * out[m].real();
    im2 += out[m].imag() * out[m].imag();
  }
  r.imag_residue = re2 > 0.0 ? std::sqrt(im2 / re2) : std::sqrt(im2);
  return r;
}

std::vector<double> Idft(std::span<const Complex> g, double tolerance) {
  return IdftChecked(g, tolerance).values;
}

template <typename T>
std::vector<T> UpsampleReplicate(std::span<const T> frames, int64_t dims, int64_t factor) {
  if (factor < 1) throw std::invalid_argument("upsampling factor must be >= 1");
  if (dims < 1 || static_cast<int64_t>(frames.size()) % dims != 0) {
    throw std::invalid_argument("frame array size is not a multiple of dims");
  }
  const int64_t B = static_cast<int64_t>(frames.size()) / dims;
  std::vector<T> out(static_cast<size_t>(B * factor * dims));
  for (int64_t b = 0; b < B; ++b) {
    for (int64_t r = 0; r < factor; ++r) {
      std::copy_n(frames.begin() + b * dims, dims, out.begin() + (b * factor + r) * dims);
    }
  }
  return out;
}

template std::vector<float> UpsampleReplicate(std::span<const float>, int64_t, int64_t);
template std::vector<double> UpsampleReplicate(std::span<const double>, int64_t, int64_t);

}  // namespace nsf::dsp
