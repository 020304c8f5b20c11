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

#include "nsf/config.h"

#include <Eigen/Core>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nsf::config {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

KeyValueConfig KeyValueConfig::Parse(const std::string& text) {
  KeyValueConfig kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = Trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    kv.values_[key] = Trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::Load(const std::string& path) { return Parse(ReadFile(path)); }

std::string KeyValueConfig::GetString(const std::string& key, const std::string& fallback) const {
  used_[key] = true;
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::GetDouble(const std::string& key, double fallback) const {
  used_[key] = true;
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  size_t pos = 0;
  double v;
  try {
    v = std::stod(it->second, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != it->second.size()) {
    throw std::invalid_argument("config key '" + key + "': '" + it->second + "' is not a number");
  }
  return v;
}

int64_t KeyValueConfig::GetInt(const std::string& key, int64_t fallback) const {
  used_[key] = true;
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  size_t pos = 0;
  int64_t v;
  try {
    v = std::stoll(it->second, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != it->second.size()) {
    throw std::invalid_argument("config key '" + key + "': '" + it->second + "' is not an integer");
  }
  return v;
}

std::string KeyValueConfig::ToString() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::vector<std::string> KeyValueConfig::UnusedKeys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

model::ModelConfig ModelConfigFrom(const KeyValueConfig& kv) {
  model::ModelConfig c;
  c.kind = model::ParseKind(kv.GetString("kind", model::KindName(c.kind)));
  auto i = [&](const char* key, int fallback) { return static_cast<int>(kv.GetInt(key, fallback)); };
  c.blocks = i("blocks", c.blocks);
  c.noise_blocks = i("noise_blocks", c.noise_blocks);
  c.stages_per_block = i("stages_per_block", c.stages_per_block);
  c.residual_width = i("residual_width", c.residual_width);
  c.skip_width = i("skip_width", c.skip_width);
  c.kernel = i("kernel", c.kernel);
  c.source.num_harmonics = i("harmonics", c.source.num_harmonics);
  c.spectral_dims = i("spectral_dims", c.spectral_dims);
  c.lstm_hidden = i("lstm_hidden", c.lstm_hidden);
  c.condition_width = i("condition_width", c.condition_width);
  c.condition_kernel = i("condition_kernel", c.condition_kernel);
  c.upsample = i("upsample", c.upsample);
  c.source.sample_rate = kv.GetDouble("sample_rate", c.source.sample_rate);
  c.source.sigma = kv.GetDouble("sigma", c.source.sigma);
  c.source.alpha = kv.GetDouble("alpha", c.source.alpha);
  c.Validate();
  return c;
}

train::TrainConfig TrainConfigFrom(const KeyValueConfig& kv) {
  train::TrainConfig t;
  t.adam.learning_rate = kv.GetDouble("learning_rate", t.adam.learning_rate);
  t.adam.beta1 = kv.GetDouble("beta1", t.adam.beta1);
  t.adam.beta2 = kv.GetDouble("beta2", t.adam.beta2);
  t.adam.epsilon = kv.GetDouble("epsilon", t.adam.epsilon);
  t.adam.clip_norm = kv.GetDouble("clip_norm", t.adam.clip_norm);
  t.batch_size = static_cast<int>(kv.GetInt("batch_size", t.batch_size));
  t.max_segment_seconds = kv.GetDouble("max_segment_seconds", t.max_segment_seconds);
  t.patience = static_cast<int>(kv.GetInt("patience", t.patience));
  t.max_epochs = static_cast<int>(kv.GetInt("max_epochs", t.max_epochs));
  t.max_steps = kv.GetInt("max_steps", t.max_steps);
  t.seed = static_cast<uint64_t>(kv.GetInt("seed", static_cast<int64_t>(t.seed)));
  t.validation_seed =
      static_cast<uint64_t>(kv.GetInt("validation_seed", static_cast<int64_t>(t.validation_seed)));
  if (kv.Has("loss_stft")) t.loss.configs = loss::ParseStftConfigs(kv.GetString("loss_stft", ""));
  t.loss.eta = kv.GetDouble("loss_eta", t.loss.eta);
  t.Validate();
  return t;
}

void StoreModelConfig(const model::ModelConfig& c, KeyValueConfig& kv) {
  auto put = [&](const char* k, auto v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    kv.Set(k, os.str());
  };
  kv.Set("kind", model::KindName(c.kind));
  put("blocks", c.blocks);
  put("noise_blocks", c.noise_blocks);
  put("stages_per_block", c.stages_per_block);
  put("residual_width", c.residual_width);
  put("skip_width", c.skip_width);
  put("kernel", c.kernel);
  put("harmonics", c.source.num_harmonics);
  put("spectral_dims", c.spectral_dims);
  put("lstm_hidden", c.lstm_hidden);
  put("condition_width", c.condition_width);
  put("condition_kernel", c.condition_kernel);
  put("upsample", c.upsample);
  put("sample_rate", c.source.sample_rate);
  put("sigma", c.source.sigma);
  put("alpha", c.source.alpha);
}

std::vector<ManifestEntry> ReadManifest(const std::string& path) {
  std::stringstream ss(ReadFile(path));
  std::vector<ManifestEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (Trim(line).empty()) continue;
    std::stringstream ls(line);
    std::string split, wav, feat, extra;
    if (!(ls >> split >> wav >> feat) || (ls >> extra)) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected 'split wav_path feature_path|-'");
    }
    ManifestEntry e;
    if (split == "train") e.split = Split::kTrain;
    else if (split == "validation" || split == "valid" || split == "val") e.split = Split::kValidation;
    else if (split == "test") e.split = Split::kTest;
    else throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": unknown split '" + split + "'");
    e.wav_path = wav;
    if (feat != "-") e.feature_path = feat;
    out.push_back(e);
  }
  return out;
}

int ThreadCountFromEnv() {
  const char* v = std::getenv("NSF_NUM_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw std::invalid_argument("NSF_NUM_THREADS must be a positive integer");
  return static_cast<int>(n);
}

void SetThreadCount(int threads) { Eigen::setNbThreads(threads); }

void RetainFreedMemory() {
#if defined(__GLIBC__)
  constexpr int kLarge = 1 << 30;
  mallopt(M_MMAP_THRESHOLD, kLarge);
  mallopt(M_TRIM_THRESHOLD, kLarge);
  mallopt(M_TOP_PAD, 64 << 20);
#endif
}

}  // namespace nsf::config
