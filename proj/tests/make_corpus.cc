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

// Writes a tiny synthetic corpus for the command-line smoke test: two
// utterances as 16-bit wav files, their F0 tracks as text, a manifest and
// a small model configuration.

#include <cstdio>
#include <fstream>
#include <string>

#include "nsf/checks.h"
#include "nsf/wav.h"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s DIR\n", argv[0]);
    return 2;
  }
  const std::string dir = argv[1];
  std::ofstream manifest(dir + "/manifest.txt");
  for (int i = 0; i < 2; ++i) {
    const auto s = nsf::checks::MakeSyntheticSpeech(0.6, static_cast<uint64_t>(i + 1));
    const std::string stem = dir + "/utt" + std::to_string(i);
    nsf::io::WriteWav(stem + ".wav", s.utterance.wave);
    std::ofstream f0(stem + ".f0");
    for (float v : s.f0) f0 << v << "\n";
    manifest << (i == 0 ? "train " : "validation ") << stem << ".wav " << stem << ".bin\n";
  }
  std::ofstream cfg(dir + "/model.cfg");
  cfg << "kind = hn-nsf\nblocks = 1\nstages_per_block = 3\nresidual_width = 8\nskip_width = 8\n"
         "max_epochs = 2\nloss_stft = 512:320:80, 128:80:40\n";
  return manifest && cfg ? 0 : 1;
}
