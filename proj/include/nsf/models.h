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

// The three source-filter waveform models.
//
//   condition:  spectral frames -> Bi-LSTM (2 x lstm_hidden) -> conv(3) + tanh
//               -> [.., normalized F0] -> repeat every frame `upsample` times
//   source:     tanh(harmonics * w + b) over the sine components of F0
//   b-NSF:      source -> blocks of gated dilated convolutions,
//               v_out = v_in * exp(b~) + a
//   s-NSF:      source -> blocks of tanh dilated convolutions, v_out = v_in + a
//   hn-NSF:     s-NSF blocks on the source, one s-NSF block on Gaussian noise,
//               both merged by the fixed low/high-pass bank per voicing flag
//
// Every dilated convolution is causal with kernel `kernel` and dilation
// 2^k at stage k.  Each block projects the condition once and adds the
// projection to the pre-activation of all its stages.

#ifndef NSF_MODELS_H_
#define NSF_MODELS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nsf/features.h"
#include "nsf/fir.h"
#include "nsf/graph.h"
#include "nsf/source.h"
#include "nsf/spectral_loss.h"

namespace nsf::model {

enum class ModelKind { kBNsf, kSNsf, kHnNsf };

std::string KindName(ModelKind kind);
// Accepts "b-nsf", "s-nsf", "hn-nsf" (case-insensitive).
ModelKind ParseKind(const std::string& name);

struct ModelConfig {
  ModelKind kind = ModelKind::kHnNsf;
  int blocks = 5;            // harmonic-branch filter blocks
  int noise_blocks = 1;      // hn-NSF only
  int stages_per_block = 10;
  int residual_width = 64;
  int skip_width = 128;
  int kernel = 3;
  int spectral_dims = 80;
  int lstm_hidden = 32;      // per direction
  int condition_width = 64;  // includes the F0 column
  int condition_kernel = 3;
  int upsample = 80;
  source::SourceConfig source;

  void Validate() const;
  // 2 blocks x 5 stages, used for fast experiments.
  static ModelConfig Reduced(ModelKind kind);
};

// Fixed affine maps applied to the inputs before the network.  Empty
// spectral vectors mean identity.  Unvoiced frames keep F0 = 0.
struct Normalization {
  double f0_mean = 0.0;
  double f0_std = 1.0;
  std::vector<double> spectral_mean;
  std::vector<double> spectral_std;

  bool operator==(const Normalization&) const = default;
  static Normalization FromFeatures(const std::vector<const features::FeatureSequence*>& data);
};

template <typename T>
class NsfModel {
 public:
  NsfModel() = default;
  // Random initialization: uniform in +-sqrt(1 / fan_in), zero biases.
  NsfModel(const ModelConfig& config, uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ag::ParameterStore<T>& params() { return params_; }
  const ag::ParameterStore<T>& params() const { return params_; }
  const fir::FilterBank& bank() const { return bank_; }
  void set_bank(fir::FilterBank bank) { bank_ = std::move(bank); }
  Normalization& normalization() { return norm_; }
  const Normalization& normalization() const { return norm_; }

  // Every trainable value set to zero.
  void ZeroParameters() { params_.ZeroValues(); }

  template <typename U>
  NsfModel<U> Cast() const {
    NsfModel<U> out;
    out.config_ = config_;
    out.params_ = params_.template Cast<U>();
    out.bank_ = bank_;
    out.norm_ = norm_;
    return out;
  }

  // Used by the checkpoint reader.
  static NsfModel Empty(const ModelConfig& config);

 private:
  template <typename>
  friend class NsfModel;

  ModelConfig config_;
  ag::ParameterStore<T> params_;
  fir::FilterBank bank_;
  Normalization norm_;
};

struct LayerCount {
  std::string name;
  Shape shape;
  int64_t count = 0;
};

template <typename T>
std::vector<LayerCount> ParameterAudit(const NsfModel<T>& model);
template <typename T>
int64_t CountParameters(const NsfModel<T>& model);
// Closed-form count from the configuration alone.
int64_t ExpectedParameterCount(const ModelConfig& config);

// Network inputs for one utterance.
template <typename T>
struct ModelInputs {
  Tensor<T> spectral;   // B x D, normalized
  Tensor<T> f0_frames;  // B x 1, normalized
  Tensor<T> harmonics;  // T x (H + 1)
  Tensor<T> noise;      // T x 1 (hn-NSF)
  Tensor<T> voiced;     // T x 1 (hn-NSF), 1 = voiced
  std::vector<float> f0_samples;  // raw per-sample F0
  int64_t num_frames = 0;
  int64_t num_samples = 0;
};

// Throws std::invalid_argument on a feature/model dimension mismatch.
template <typename T>
ModelInputs<T> PrepareInputs(const NsfModel<T>& model, const features::FeatureSequence& feat,
                             uint64_t seed, bool add_noise = true);

enum class LossKind { kNone, kSpectral, kMse };

struct GraphOptions {
  LossKind loss = LossKind::kNone;
  loss::MultiResLossConfig loss_config;
  bool keep_block_taps = false;
};

template <typename T>
struct ModelGraph {
  ag::Graph<T> graph;
  ag::NodeId waveform = -1;
  ag::NodeId excitation = -1;
  ag::NodeId condition = -1;
  ag::NodeId loss = -1;
  std::vector<ag::NodeId> block_taps;
  std::vector<std::string> block_names;
  int64_t num_frames = 0;
  int64_t num_samples = 0;

  // Named input bindings; `target` is required when the graph has a loss.
  typename ag::Graph<T>::Bindings Bind(const ModelInputs<T>& in,
                                       const Tensor<T>* target = nullptr) const;
};

// The model must outlive the graph.  The graph output is the loss if one
// was requested, otherwise the waveform.
template <typename T>
ModelGraph<T> BuildGraph(NsfModel<T>& model, int64_t num_frames, const GraphOptions& options = {});

extern template class NsfModel<float>;
extern template class NsfModel<double>;

}  // namespace nsf::model

#endif  // NSF_MODELS_H_
