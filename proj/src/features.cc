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

#include "nsf/features.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "nsf/pitch.h"

namespace nsf::features {
namespace {

uint32_t ToLittle(uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> BandPeaks(const MelConfig& cfg) {
  const double lo = HzToMel(cfg.min_hz), hi = HzToMel(cfg.max_hz);
  std::vector<double> p(static_cast<size_t>(cfg.num_bands + 2));
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] = MelToHz(lo + (hi - lo) * static_cast<double>(i) / (cfg.num_bands + 1));
  }
  return p;
}

}  // namespace

void FeatureSequence::Validate() const {
  if (f0.empty()) throw std::invalid_argument("feature sequence has no frames");
  if (spectral_dims < 1) throw std::invalid_argument("spectral_dims must be >= 1");
  if (spectral.size() != f0.size() * static_cast<size_t>(spectral_dims)) {
    throw std::invalid_argument("spectral block holds " + std::to_string(spectral.size()) +
                                " values, expected " + std::to_string(f0.size()) + " x " +
                                std::to_string(spectral_dims));
  }
  for (size_t b = 0; b < f0.size(); ++b) {
    if (!std::isfinite(f0[b]) || f0[b] < 0.0f) {
      throw std::invalid_argument("F0 at frame " + std::to_string(b) + " is negative or not finite");
    }
  }
  for (float v : spectral) {
    if (!std::isfinite(v)) throw std::invalid_argument("spectral features contain non-finite values");
  }
}

FeatureSequence FeatureSequence::Slice(int64_t begin, int64_t end) const {
  if (begin < 0 || end > num_frames() || begin >= end) {
    throw std::out_of_range("frame slice out of range");
  }
  FeatureSequence out;
  out.spectral_dims = spectral_dims;
  out.frame_shift_ms = frame_shift_ms;
  out.f0.assign(f0.begin() + begin, f0.begin() + end);
  out.spectral.assign(spectral.begin() + begin * spectral_dims,
                      spectral.begin() + end * spectral_dims);
  return out;
}

void WriteFeatures(const std::string& path, const FeatureSequence& feat) {
  feat.Validate();
  std::vector<uint32_t> words;
  words.reserve(feat.f0.size() * static_cast<size_t>(1 + feat.spectral_dims));
  auto push = [&](float v) { words.push_back(ToLittle(std::bit_cast<uint32_t>(v))); };
  for (int64_t b = 0; b < feat.num_frames(); ++b) {
    push(feat.f0[static_cast<size_t>(b)]);
    for (int d = 0; d < feat.spectral_dims; ++d) {
      push(feat.spectral[static_cast<size_t>(b * feat.spectral_dims + d)]);
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create '" + path + "'");
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * 4));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

FeatureSequence ReadFeatures(const std::string& path, int dims) {
  if (dims < 2) throw std::invalid_argument("feature dims must include F0 and >= 1 spectral value");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const size_t frame_bytes = 4 * static_cast<size_t>(dims);
  if (buf.size() % frame_bytes != 0) {
    throw std::runtime_error("'" + path + "': size " + std::to_string(buf.size()) +
                             " bytes is not a multiple of " + std::to_string(frame_bytes) +
                             " (" + std::to_string(dims) + " float32 values per frame)");
  }
  const size_t B = buf.size() / frame_bytes;
  FeatureSequence feat;
  feat.spectral_dims = dims - 1;
  feat.f0.resize(B);
  feat.spectral.resize(B * static_cast<size_t>(dims - 1));
  for (size_t b = 0; b < B; ++b) {
    for (int d = 0; d < dims; ++d) {
      uint32_t w;
      std::memcpy(&w, buf.data() + b * frame_bytes + 4 * static_cast<size_t>(d), 4);
      const float v = std::bit_cast<float>(ToLittle(w));
      if (d == 0) {
        feat.f0[b] = v;
      } else {
        feat.spectral[b * static_cast<size_t>(dims - 1) + static_cast<size_t>(d - 1)] = v;
      }
    }
  }
  return feat;
}

std::vector<std::vector<double>> MelFilterbank(const MelConfig& cfg) {
  cfg.stft.Validate();
  if (cfg.num_bands < 1) throw std::invalid_argument("num_bands must be >= 1");
  if (!(cfg.min_hz >= 0.0 && cfg.min_hz < cfg.max_hz && cfg.max_hz <= cfg.sample_rate / 2.0)) {
    throw std::invalid_argument("mel frequency range must lie within [0, fs/2]");
  }
  const int bins = cfg.stft.dft_bins / 2 + 1;
  const std::vector<double> p = BandPeaks(cfg);
  std::vector<std::vector<double>> fb(static_cast<size_t>(cfg.num_bands),
                                      std::vector<double>(static_cast<size_t>(bins), 0.0));
  for (int m = 0; m < cfg.num_bands; ++m) {
    const double lo = p[static_cast<size_t>(m)], mid = p[static_cast<size_t>(m + 1)],
                 hi = p[static_cast<size_t>(m + 2)];
    for (int i = 0; i < bins; ++i) {
      const double f = i * cfg.sample_rate / cfg.stft.dft_bins;
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      fb[static_cast<size_t>(m)][static_cast<size_t>(i)] = w;
    }
  }
  return fb;
}

int MelBandForFrequency(const MelConfig& cfg, double hz) {
  const std::vector<double> p = BandPeaks(cfg);
  int best = 0;
  for (int m = 1; m < cfg.num_bands; ++m) {
    if (std::abs(p[static_cast<size_t>(m + 1)] - hz) < std::abs(p[static_cast<size_t>(best + 1)] - hz)) {
      best = m;
    }
  }
  return best;
}

std::vector<float> ExtractMelSpectrogram(const dsp::Waveform& w, const MelConfig& cfg) {
  w.Validate();
  const auto fb = MelFilterbank(cfg);
  const std::vector<double> x(w.samples.begin(), w.samples.end());
  const dsp::FrameMatrix frames = dsp::FrameAndWindow(x, cfg.stft);
  const int bins = cfg.stft.dft_bins / 2 + 1;
  std::vector<float> out(static_cast<size_t>(frames.num_frames * cfg.num_bands));
  std::vector<double> mag(static_cast<size_t>(bins));
  for (int64_t n = 0; n < frames.num_frames; ++n) {
    const dsp::Spectrum y = dsp::Dft(frames.frame(n), cfg.stft.dft_bins);
    for (int i = 0; i < bins; ++i) mag[static_cast<size_t>(i)] = std::abs(y[static_cast<size_t>(i)]);
    for (int m = 0; m < cfg.num_bands; ++m) {
      double e = 0.0;
      const auto& row = fb[static_cast<size_t>(m)];
      for (int i = 0; i < bins; ++i) e += row[static_cast<size_t>(i)] * mag[static_cast<size_t>(i)];
      out[static_cast<size_t>(n * cfg.num_bands + m)] =
          static_cast<float>(std::log(std::max(e, cfg.floor)));
    }
  }
  return out;
}

FeatureSequence ExtractFeatures(const dsp::Waveform& w, const MelConfig& cfg,
                                std::span<const float> f0) {
  w.Validate();
  const int shift = cfg.stft.frame_shift;
  const int64_t B = w.size() / shift;
  if (B < 1) throw std::invalid_argument("waveform shorter than one frame shift");
  const int pad = (cfg.stft.frame_length - shift) / 2;
  dsp::Waveform padded;
  padded.sample_rate = w.sample_rate;
  padded.samples.assign(static_cast<size_t>(pad), 0.0f);
  padded.samples.insert(padded.samples.end(), w.samples.begin(), w.samples.end());
  padded.samples.resize(padded.samples.size() + static_cast<size_t>(pad), 0.0f);

  FeatureSequence feat;
  feat.spectral_dims = cfg.num_bands;
  feat.frame_shift_ms = 1000.0 * shift / w.sample_rate;
  feat.spectral = ExtractMelSpectrogram(padded, cfg);
  feat.spectral.resize(static_cast<size_t>(B * cfg.num_bands));
  if (!f0.empty()) {
    if (static_cast<int64_t>(f0.size()) < B) {
      throw std::invalid_argument("external F0 has " + std::to_string(f0.size()) +
                                  " frames, expected " + std::to_string(B));
    }
    feat.f0.assign(f0.begin(), f0.begin() + B);
  } else {
    const std::vector<double> est = dsp::EstimateF0(w, shift);
    feat.f0.assign(est.begin(), est.end());
  }
  return feat;
}

}  // namespace nsf::features
