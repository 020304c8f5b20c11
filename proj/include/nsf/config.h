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

// Flat `key = value` configuration files and dataset manifests.
//
// Config lines: `key = value`; `#` starts a comment; blank lines ignored.
// Manifest lines: `split wav_path feature_path`, where split is one of
// train, validation, test and feature_path may be `-` to extract features
// from the waveform on load.

#ifndef NSF_CONFIG_H_
#define NSF_CONFIG_H_

#include <map>
#include <string>
#include <vector>

#include "nsf/models.h"
#include "nsf/train.h"

namespace nsf::config {

class KeyValueConfig {
 public:
  static KeyValueConfig Parse(const std::string& text);
  static KeyValueConfig Load(const std::string& path);

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  int64_t GetInt(const std::string& key, int64_t fallback) const;
  void Set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }
  std::string ToString() const;

  // Keys never read by any getter, for typo warnings.
  std::vector<std::string> UnusedKeys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

// Keys: kind, blocks, noise_blocks, stages_per_block, residual_width,
// skip_width, kernel, harmonics, spectral_dims, lstm_hidden, upsample,
// sample_rate, sigma, alpha.
model::ModelConfig ModelConfigFrom(const KeyValueConfig& kv);
void StoreModelConfig(const model::ModelConfig& c, KeyValueConfig& kv);

// Keys: learning_rate, beta1, beta2, epsilon, clip_norm, batch_size,
// max_segment_seconds, patience, max_epochs, max_steps, seed,
// validation_seed, loss_stft (e.g. `512:320:80;128:80:40`), loss_eta.
train::TrainConfig TrainConfigFrom(const KeyValueConfig& kv);

enum class Split { kTrain, kValidation, kTest };

struct ManifestEntry {
  Split split = Split::kTrain;
  std::string wav_path;
  std::string feature_path;  // empty: extract on load
};

std::vector<ManifestEntry> ReadManifest(const std::string& path);

// NSF_NUM_THREADS, defaulting to 1.
int ThreadCountFromEnv();
void SetThreadCount(int threads);

// Keeps freed activation buffers in the heap instead of returning them to
// the system, so long sequences do not pay page faults on every layer.
// No-op outside glibc.
void RetainFreedMemory();

}  // namespace nsf::config

#endif  // NSF_CONFIG_H_
