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

#include "nsf/models.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nsf::model {
namespace {

std::string BlockPrefix(bool noise, int i) {
  return (noise ? "noise_block" : "block") + std::to_string(i);
}

std::string StagePrefix(const std::string& block, int k) {
  return block + ".stage" + std::to_string(k);
}

bool IsGated(ModelKind kind) { return kind == ModelKind::kBNsf; }

// Registers parameters in a fixed order and draws their initial values.
template <typename T>
class Initializer {
 public:
  Initializer(ag::ParameterStore<T>& store, uint64_t seed, bool random)
      : store_(store), rng_(seed), random_(random) {}

  void Weight(const std::string& name, const Shape& shape, int64_t fan_in) {
    auto& p = store_.Add(name, shape);
    if (!random_) return;
    const double limit = std::sqrt(1.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> uni(-limit, limit);
    for (auto& v : p.value.values()) v = static_cast<T>(uni(rng_));
  }
  void Bias(const std::string& name, int64_t size) { store_.Add(name, {size}); }

 private:
  ag::ParameterStore<T>& store_;
  std::mt19937_64 rng_;
  bool random_;
};

template <typename T>
void RegisterBlock(Initializer<T>& init, const ModelConfig& c, const std::string& b, bool gated) {
  const int64_t R = c.residual_width, S = c.skip_width, C = c.condition_width;
  const int64_t conv_out = gated ? 2 * R : R;
  init.Weight(b + ".in.w", {1, R}, 1);
  init.Bias(b + ".in.b", R);
  init.Weight(b + ".cond.w", {C, conv_out}, C);
  init.Bias(b + ".cond.b", conv_out);
  for (int k = 0; k < c.stages_per_block; ++k) {
    const std::string s = StagePrefix(b, k);
    init.Weight(s + ".conv.w", {c.kernel, R, conv_out}, c.kernel * R);
    init.Bias(s + ".conv.b", conv_out);
    if (gated) {
      init.Weight(s + ".res.w", {R, R}, R);
      init.Bias(s + ".res.b", R);
    }
    init.Weight(s + ".skip.w", {R, S}, R);
    init.Bias(s + ".skip.b", S);
  }
  init.Weight(b + ".out.w", {S, gated ? 2 : 1}, S);
  init.Bias(b + ".out.b", gated ? 2 : 1);
}

template <typename T>
void RegisterAll(ag::ParameterStore<T>& store, const ModelConfig& c, uint64_t seed, bool random) {
  Initializer<T> init(store, seed, random);
  const int64_t D = c.spectral_dims, H = c.lstm_hidden;
  for (const char* dir : {"cond.lstm_fwd", "cond.lstm_bwd"}) {
    const std::string p = dir;
    init.Weight(p + ".w_input", {D, 4 * H}, D);
    init.Weight(p + ".w_recurrent", {H, 4 * H}, H);
    init.Bias(p + ".bias", 4 * H);
  }
  init.Weight("cond.conv.w", {c.condition_kernel, 2 * H, c.condition_width - 1},
              c.condition_kernel * 2 * H);
  init.Bias("cond.conv.b", c.condition_width - 1);
  init.Weight("source.mixer.w", {c.source.num_harmonics + 1, 1}, c.source.num_harmonics + 1);
  init.Bias("source.mixer.b", 1);
  const bool gated = IsGated(c.kind);
  for (int i = 0; i < c.blocks; ++i) RegisterBlock(init, c, BlockPrefix(false, i), gated);
  if (c.kind == ModelKind::kHnNsf) {
    for (int i = 0; i < c.noise_blocks; ++i) RegisterBlock(init, c, BlockPrefix(true, i), false);
  }
  if (random && gated) {
    // b~ starts at zero so that exp(b~) = 1 and the blocks start near identity.
    for (int i = 0; i < c.blocks; ++i) {
      auto* w = store.Find(BlockPrefix(false, i) + ".out.w");
      for (int64_t r = 0; r < w->value.dim(0); ++r) w->value.at(r, 1) = T(0);
    }
  }
}

// Builds the graph pieces that need access to the parameters by name.
template <typename T>
class Builder {
 public:
  Builder(ag::Graph<T>& g, NsfModel<T>& m) : g_(g), m_(m) {}

  ag::NodeId P(const std::string& name) {
    ag::Parameter<T>* p = m_.params().Find(name);
    if (!p) throw std::logic_error("model has no parameter '" + name + "'");
    return g_.Param(*p);
  }

  ag::NodeId Condition(ag::NodeId spectral, ag::NodeId f0) {
    const ModelConfig& c = m_.config();
    ag::NodeId fw = g_.Lstm(spectral, P("cond.lstm_fwd.w_input"), P("cond.lstm_fwd.w_recurrent"),
                            P("cond.lstm_fwd.bias"), false);
    ag::NodeId bw = g_.Lstm(spectral, P("cond.lstm_bwd.w_input"), P("cond.lstm_bwd.w_recurrent"),
                            P("cond.lstm_bwd.bias"), true);
    ag::NodeId bi = g_.Concat({fw, bw});
    ag::NodeId conv = g_.Tanh(
        g_.Conv1d(bi, P("cond.conv.w"), P("cond.conv.b"), 1, ag::Padding::kSame));
    return g_.Upsample(g_.Concat({conv, f0}), c.upsample);
  }

  ag::NodeId Block(const std::string& b, ag::NodeId v, ag::NodeId cond, bool gated) {
    const ModelConfig& c = m_.config();
    ag::NodeId x = g_.Tanh(g_.MatMul(v, P(b + ".in.w"), P(b + ".in.b")));
    ag::NodeId cp = g_.MatMul(cond, P(b + ".cond.w"), P(b + ".cond.b"));
    ag::NodeId skip = -1;
    for (int k = 0; k < c.stages_per_block; ++k) {
      const std::string s = StagePrefix(b, k);
      ag::NodeId pre = g_.Add({g_.Conv1d(x, P(s + ".conv.w"), P(s + ".conv.b"), 1 << k,
                                         ag::Padding::kCausal),
                               cp});
      ag::NodeId h;
      if (gated) {
        h = g_.Gate(pre);
        x = g_.Add({x, g_.MatMul(h, P(s + ".res.w"), P(s + ".res.b"))});
      } else {
        h = g_.Tanh(pre);
        x = g_.Add({x, h});
      }
      ag::NodeId contribution = g_.MatMul(h, P(s + ".skip.w"), P(s + ".skip.b"));
      // A running sum keeps at most one skip tensor alive at a time.
      skip = skip < 0 ? contribution : g_.Add({skip, contribution});
    }
    ag::NodeId head = g_.MatMul(skip, P(b + ".out.w"), P(b + ".out.b"));
    if (!gated) return g_.Add({v, head});
    ag::NodeId a = g_.SliceCols(head, 0, 1);
    ag::NodeId scale = g_.Exp(g_.SliceCols(head, 1, 2));
    return g_.Add({g_.Multiply(v, scale), a});
  }

 private:
  ag::Graph<T>& g_;
  NsfModel<T>& m_;
};

}  // namespace

std::string KindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kBNsf: return "b-nsf";
    case ModelKind::kSNsf: return "s-nsf";
    case ModelKind::kHnNsf: return "hn-nsf";
  }
  return "?";
}

ModelKind ParseKind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "b-nsf" || s == "bnsf") return ModelKind::kBNsf;
  if (s == "s-nsf" || s == "snsf") return ModelKind::kSNsf;
  if (s == "hn-nsf" || s == "hnnsf") return ModelKind::kHnNsf;
  throw std::invalid_argument("unknown model kind '" + name + "' (expected b-nsf, s-nsf or hn-nsf)");
}

void ModelConfig::Validate() const {
  auto req = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("model config: ") + what);
  };
  req(blocks >= 1, "blocks must be >= 1");
  req(kind != ModelKind::kHnNsf || noise_blocks >= 1, "noise_blocks must be >= 1");
  req(stages_per_block >= 1 && stages_per_block <= 20, "stages_per_block must be in [1, 20]");
  req(residual_width >= 1 && skip_width >= 1, "widths must be >= 1");
  req(kernel >= 1, "kernel must be >= 1");
  req(spectral_dims >= 1, "spectral_dims must be >= 1");
  req(lstm_hidden >= 1, "lstm_hidden must be >= 1");
  req(condition_width >= 2, "condition_width must be >= 2");
  req(condition_kernel >= 1 && condition_kernel % 2 == 1, "condition_kernel must be odd");
  req(upsample >= 1, "upsample must be >= 1");
  source.Validate();
}

ModelConfig ModelConfig::Reduced(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.blocks = 2;
  c.stages_per_block = 5;
  return c;
}

Normalization Normalization::FromFeatures(const std::vector<const features::FeatureSequence*>& data) {
  Normalization n;
  if (data.empty()) return n;
  const int D = data.front()->spectral_dims;
  double f_sum = 0.0, f_sq = 0.0;
  int64_t f_count = 0, frames = 0;
  std::vector<double> s_sum(static_cast<size_t>(D), 0.0), s_sq(static_cast<size_t>(D), 0.0);
  for (const auto* f : data) {
    if (f->spectral_dims != D) throw std::invalid_argument("feature dims differ across utterances");
    for (int64_t b = 0; b < f->num_frames(); ++b) {
      const double v = f->f0[static_cast<size_t>(b)];
      if (v > 0.0) {
        f_sum += v;
        f_sq += v * v;
        ++f_count;
      }
      for (int d = 0; d < D; ++d) {
        const double s = f->spectral[static_cast<size_t>(b * D + d)];
        s_sum[static_cast<size_t>(d)] += s;
        s_sq[static_cast<size_t>(d)] += s * s;
      }
      ++frames;
    }
  }
  auto stats = [](double sum, double sq, int64_t count, double& mean, double& std) {
    mean = sum / static_cast<double>(count);
    std = std::sqrt(std::max(sq / static_cast<double>(count) - mean * mean, 0.0));
    if (std < 1e-3) std = 1.0;
  };
  if (f_count > 0) stats(f_sum, f_sq, f_count, n.f0_mean, n.f0_std);
  if (frames > 0) {
    n.spectral_mean.resize(static_cast<size_t>(D));
    n.spectral_std.resize(static_cast<size_t>(D));
    for (size_t d = 0; d < static_cast<size_t>(D); ++d) {
      stats(s_sum[d], s_sq[d], frames, n.spectral_mean[d], n.spectral_std[d]);
    }
  }
  return n;
}

template <typename T>
NsfModel<T>::NsfModel(const ModelConfig& config, uint64_t seed) : config_(config) {
  config_.Validate();
  RegisterAll(params_, config_, seed, true);
  if (config_.kind == ModelKind::kHnNsf) bank_ = fir::FilterBank::Design(config_.source.sample_rate);
}

template <typename T>
NsfModel<T> NsfModel<T>::Empty(const ModelConfig& config) {
  config.Validate();
  NsfModel<T> m;
  m.config_ = config;
  RegisterAll(m.params_, config, 0, false);
  return m;
}

template <typename T>
std::vector<LayerCount> ParameterAudit(const NsfModel<T>& model) {
  std::vector<LayerCount> out;
  const auto& store = model.params();
  for (size_t i = 0; i < store.size(); ++i) {
    out.push_back({store[i].name, store[i].value.shape(), store[i].value.size()});
  }
  return out;
}

template <typename T>
int64_t CountParameters(const NsfModel<T>& model) {
  return model.params().CountElements();
}

int64_t ExpectedParameterCount(const ModelConfig& c) {
  const int64_t D = c.spectral_dims, H = c.lstm_hidden, C = c.condition_width;
  const int64_t R = c.residual_width, S = c.skip_width, K = c.kernel;
  const int64_t lstm = 2 * (D * 4 * H + H * 4 * H + 4 * H);
  const int64_t cond_conv = c.condition_kernel * 2 * H * (C - 1) + (C - 1);
  const int64_t mixer = (c.source.num_harmonics + 1) + 1;
  auto block = [&](bool gated) {
    const int64_t out = gated ? 2 * R : R;
    int64_t stage = K * R * out + out + R * S + S;
    if (gated) stage += R * R + R;
    const int64_t heads = gated ? 2 : 1;
    return 2 * R + C * out + out + c.stages_per_block * stage + S * heads + heads;
  };
  int64_t total = lstm + cond_conv + mixer + c.blocks * block(IsGated(c.kind));
  if (c.kind == ModelKind::kHnNsf) total += c.noise_blocks * block(false);
  return total;
}

template <typename T>
ModelInputs<T> PrepareInputs(const NsfModel<T>& model, const features::FeatureSequence& feat,
                             uint64_t seed, bool add_noise) {
  feat.Validate();
  const ModelConfig& c = model.config();
  if (feat.spectral_dims != c.spectral_dims) {
    throw std::invalid_argument("features have " + std::to_string(feat.spectral_dims) +
                                " spectral dims but the model expects " +
                                std::to_string(c.spectral_dims));
  }
  const Normalization& n = model.normalization();
  const int64_t B = feat.num_frames();
  const int64_t D = c.spectral_dims;
  if (!n.spectral_mean.empty() &&
      (static_cast<int64_t>(n.spectral_mean.size()) != D ||
       static_cast<int64_t>(n.spectral_std.size()) != D)) {
    throw std::invalid_argument("normalization statistics do not match the spectral dims");
  }

  ModelInputs<T> in;
  in.num_frames = B;
  in.num_samples = B * c.upsample;
  in.spectral = Tensor<T>({B, D});
  in.f0_frames = Tensor<T>({B, 1});
  for (int64_t b = 0; b < B; ++b) {
    for (int64_t d = 0; d < D; ++d) {
      double v = feat.spectral[static_cast<size_t>(b * D + d)];
      if (!n.spectral_mean.empty()) {
        v = (v - n.spectral_mean[static_cast<size_t>(d)]) / n.spectral_std[static_cast<size_t>(d)];
      }
      in.spectral.at(b, d) = static_cast<T>(v);
    }
    const double f = feat.f0[static_cast<size_t>(b)];
    in.f0_frames[b] = f > 0.0 ? static_cast<T>((f - n.f0_mean) / n.f0_std) : T(0);
  }

  in.f0_samples = dsp::UpsampleReplicate<float>(feat.f0, 1, c.upsample);
  in.harmonics = source::HarmonicComponents(in.f0_samples, c.source,
                                            source::StreamSeed(seed, 0), add_noise)
                     .template Cast<T>();
  if (c.kind == ModelKind::kHnNsf) {
    const std::vector<float> noise =
        source::NoiseExcitation(in.num_samples, c.source, source::StreamSeed(seed, 1));
    in.noise = Tensor<T>({in.num_samples, 1}, std::vector<T>(noise.begin(), noise.end()));
    in.voiced = Tensor<T>({in.num_samples, 1});
    for (int64_t t = 0; t < in.num_samples; ++t) {
      in.voiced[t] = in.f0_samples[static_cast<size_t>(t)] > 0.0f ? T(1) : T(0);
    }
  }
  return in;
}

template <typename T>
typename ag::Graph<T>::Bindings ModelGraph<T>::Bind(const ModelInputs<T>& in,
                                                    const Tensor<T>* target) const {
  if (in.num_frames != num_frames) {
    throw std::invalid_argument("inputs have " + std::to_string(in.num_frames) +
                                " frames but the graph was built for " +
                                std::to_string(num_frames));
  }
  typename ag::Graph<T>::Bindings b{
      {"spectral", &in.spectral}, {"f0", &in.f0_frames}, {"harmonics", &in.harmonics}};
  if (graph.FindInput("noise") >= 0) {
    b["noise"] = &in.noise;
    b["voiced"] = &in.voiced;
  }
  if (loss >= 0) {
    if (!target) throw std::invalid_argument("graph has a loss but no target waveform was given");
    b["target"] = target;
  }
  return b;
}

template <typename T>
ModelGraph<T> BuildGraph(NsfModel<T>& model, int64_t num_frames, const GraphOptions& options) {
  const ModelConfig& c = model.config();
  if (num_frames < 1) throw std::invalid_argument("graph needs at least one frame");
  ModelGraph<T> mg;
  mg.num_frames = num_frames;
  mg.num_samples = num_frames * c.upsample;
  auto& g = mg.graph;
  Builder<T> build(g, model);
  const int64_t T_len = mg.num_samples;

  const ag::NodeId spectral = g.Input("spectral", {num_frames, c.spectral_dims});
  const ag::NodeId f0 = g.Input("f0", {num_frames, 1});
  const ag::NodeId harmonics = g.Input("harmonics", {T_len, c.source.num_harmonics + 1});
  mg.condition = build.Condition(spectral, f0);
  mg.excitation = g.Tanh(
      g.MatMul(harmonics, build.P("source.mixer.w"), build.P("source.mixer.b")));

  const bool gated = IsGated(c.kind);
  ag::NodeId v = mg.excitation;
  for (int i = 0; i < c.blocks; ++i) {
    v = build.Block(BlockPrefix(false, i), v, mg.condition, gated);
    mg.block_taps.push_back(v);
    mg.block_names.push_back(BlockPrefix(false, i));
  }
  if (c.kind == ModelKind::kHnNsf) {
    const ag::NodeId noise = g.Input("noise", {T_len, 1});
    const ag::NodeId voiced = g.Input("voiced", {T_len, 1});
    ag::NodeId nv = noise;
    for (int i = 0; i < c.noise_blocks; ++i) {
      nv = build.Block(BlockPrefix(true, i), nv, mg.condition, false);
      mg.block_taps.push_back(nv);
      mg.block_names.push_back(BlockPrefix(true, i));
    }
    v = fir::AddFirMerge(g, v, nv, voiced, model.bank());
  }
  mg.waveform = v;
  g.SetOutput(v);

  if (options.loss != LossKind::kNone) {
    const ag::NodeId target = g.Input("target", {T_len, 1});
    mg.loss = options.loss == LossKind::kSpectral
                  ? loss::AddSpectralLoss(g, mg.waveform, target, options.loss_config)
                  : loss::AddWaveformMse(g, mg.waveform, target);
    g.SetOutput(mg.loss);
    g.Retain(mg.waveform);
  }
  if (options.keep_block_taps) {
    for (ag::NodeId id : mg.block_taps) g.Retain(id);
    g.Retain(mg.excitation);
  }
  return mg;
}

template class NsfModel<float>;
template class NsfModel<double>;
template struct ModelGraph<float>;
template struct ModelGraph<double>;
template std::vector<LayerCount> ParameterAudit(const NsfModel<float>&);
template std::vector<LayerCount> ParameterAudit(const NsfModel<double>&);
template int64_t CountParameters(const NsfModel<float>&);
template int64_t CountParameters(const NsfModel<double>&);
template ModelInputs<float> PrepareInputs(const NsfModel<float>&, const features::FeatureSequence&,
                                          uint64_t, bool);
template ModelInputs<double> PrepareInputs(const NsfModel<double>&,
                                           const features::FeatureSequence&, uint64_t, bool);
template ModelGraph<float> BuildGraph(NsfModel<float>&, int64_t, const GraphOptions&);
template ModelGraph<double> BuildGraph(NsfModel<double>&, int64_t, const GraphOptions&);

}  // namespace nsf::model
