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

// 16-bit PCM mono RIFF/WAVE files.  Samples are scaled by 1/32768 on read;
// writing rounds and saturates.

#ifndef NSF_WAV_H_
#define NSF_WAV_H_

#include <string>

#include "nsf/dsp.h"

namespace nsf::io {

dsp::Waveform ReadWav(const std::string& path);
void WriteWav(const std::string& path, const dsp::Waveform& w);

}  // namespace nsf::io

#endif  // NSF_WAV_H_
