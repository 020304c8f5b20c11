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

#include "nsf/pitch.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsf::dsp {

std::vector<double> EstimateF0(const Waveform& w, int frame_shift, const PitchOptions& opt) {
  w.Validate();
  if (w.sample_rate < 8000.0) throw std::invalid_argument("pitch tracking needs >= 8 kHz audio");
  if (frame_shift < 1) throw std::invalid_argument("frame_shift must be >= 1");
  if (!(opt.min_f0 > 0.0 && opt.max_f0 > opt.min_f0)) {
    throw std::invalid_argument("invalid F0 search range");
  }

  const int64_t T = w.size();
  const int64_t B = T / frame_shift;
  const int W = opt.window;
  const int min_lag = std::max(2, static_cast<int>(std::floor(w.sample_rate / opt.max_f0)));
  const int max_lag = static_cast<int>(std::ceil(w.sample_rate / opt.min_f0));
  auto sample = [&](int64_t t) -> double {
    return (t >= 0 && t < T) ? static_cast<double>(w.samples[static_cast<size_t>(t)]) : 0.0;
  };

  // Energy gate relative to the loudest analysis window.
  std::vector<double> energy(static_cast<size_t>(B), 0.0);
  double max_energy = 0.0;
  for (int64_t b = 0; b < B; ++b) {
    const int64_t start = b * frame_shift + frame_shift / 2 - W / 2;
    double e = 0.0;
    for (int i = 0; i < W; ++i) e += sample(start + i) * sample(start + i);
    energy[static_cast<size_t>(b)] = e;
    max_energy = std::max(max_energy, e);
  }

  std::vector<double> f0(static_cast<size_t>(B), 0.0);
  if (max_energy <= 0.0) return f0;

  std::vector<double> x(static_cast<size_t>(W + max_lag + 1));
  std::vector<double> ncc(static_cast<size_t>(max_lag + 2), 0.0);
  for (int64_t b = 0; b < B; ++b) {
    if (energy[static_cast<size_t>(b)] < opt.silence_ratio * max_energy) continue;
    const int64_t start = b * frame_shift + frame_shift / 2 - W / 2;
    for (size_t i = 0; i < x.size(); ++i) x[i] = sample(start + static_cast<int64_t>(i));

    const double e0 = energy[static_cast<size_t>(b)];
    // Energy of the lagged window, updated incrementally.
    double el = 0.0;
    for (int i = 0; i < W; ++i) el += x[static_cast<size_t>(i + min_lag - 1)] * x[static_cast<size_t>(i + min_lag - 1)];
    double best = -1.0;
    for (int lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
      if (lag > min_lag - 1) {
        const double out = x[static_cast<size_t>(lag - 1)];
        const double in = (lag + W - 1 < static_cast<int>(x.size())) ? x[static_cast<size_t>(lag + W - 1)] : 0.0;
        el += in * in - out * out;
      }
      if (lag > max_lag) break;
      double c = 0.0;
      for (int i = 0; i < W; ++i) c += x[static_cast<size_t>(i)] * x[static_cast<size_t>(i + lag)];
      const double d = std::sqrt(e0 * std::max(el, 0.0));
      ncc[static_cast<size_t>(lag)] = d > 0.0 ? c / d : 0.0;
      if (lag >= min_lag) best = std::max(best, ncc[static_cast<size_t>(lag)]);
    }
    if (best < opt.voicing_threshold) continue;

    // Shortest lag whose peak is close to the best one; this avoids picking
    // a multiple of the period.
    int pick = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      const double v = ncc[static_cast<size_t>(lag)];
      const bool peak = v >= ncc[static_cast<size_t>(lag - 1)] &&
                        (lag == max_lag || v >= ncc[static_cast<size_t>(lag + 1)]);
      if (peak && v >= 0.9 * best) {
        pick = lag;
        break;
      }
    }
    if (pick < 0) continue;
    double refined = pick;
    if (pick > min_lag && pick < max_lag) {
      const double a = ncc[static_cast<size_t>(pick - 1)];
      const double m = ncc[static_cast<size_t>(pick)];
      const double c = ncc[static_cast<size_t>(pick + 1)];
      const double denom = a - 2.0 * m + c;
      if (denom < 0.0) refined += std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    }
    f0[static_cast<size_t>(b)] = w.sample_rate / refined;
  }
  return f0;
}

}  // namespace nsf::dsp
