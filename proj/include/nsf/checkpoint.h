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

// Binary model checkpoints.  All integers and floats are little-endian.
//
//   "NSFCKPT" 0x00, u32 version
//   string  model configuration as `key = value` lines
//   u32 count, then per parameter:
//       string name, u32 rank, i64 dims[rank], f32 values[prod(dims)]
//   u32 count, then per FIR filter:
//       string name, f64 pass_lo pass_hi stop_lo stop_hi ripple_db
//       attenuation_db sample_rate, i32 max_order, u32 taps, f64 taps[]
//   f64 f0_mean f0_std, u32 n, f64 spectral_mean[n], u32 n, f64 spectral_std[n]
//
// A string is a u32 byte count followed by the bytes.

#ifndef NSF_CHECKPOINT_H_
#define NSF_CHECKPOINT_H_

#include <string>

#include "nsf/models.h"

namespace nsf::io {

inline constexpr uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const std::string& path, const model::NsfModel<float>& model);
// Throws std::runtime_error on a malformed file, an unknown version or a
// parameter set that does not match the stored configuration.
model::NsfModel<float> LoadCheckpoint(const std::string& path);

}  // namespace nsf::io

#endif  // NSF_CHECKPOINT_H_
