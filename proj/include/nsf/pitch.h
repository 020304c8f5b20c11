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

// Normalized cross-correlation F0 tracker.  Used to check that generated
// speech follows its input F0; training data is expected to come with F0
// from an external tracker.

#ifndef NSF_PITCH_H_
#define NSF_PITCH_H_

#include <vector>

#include "nsf/dsp.h"

namespace nsf::dsp {

struct PitchOptions {
  double min_f0 = 60.0;
  double max_f0 = 500.0;
  // Peak correlation needed to call a frame voiced.
  double voicing_threshold = 0.3;
  int window = 640;
  // Frames whose energy is below this fraction of the loudest frame are
  // unvoiced regardless of correlation.
  double silence_ratio = 1e-4;
};

// One value per frame (B = floor(T / frame_shift)), 0 for unvoiced.  Frame b
// is analysed around sample b * frame_shift + frame_shift / 2.
std::vector<double> EstimateF0(const Waveform& w, int frame_shift,
                               const PitchOptions& options = {});

}  // namespace nsf::dsp

#endif  // NSF_PITCH_H_
