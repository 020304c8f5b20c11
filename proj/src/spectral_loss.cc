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

#include "nsf/spectral_loss.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nsf::loss {
namespace {

void CheckLengths(size_t a, size_t b) {
  if (a != b) {
    throw std::invalid_argument("waveform lengths differ: generated " + std::to_string(a) +
                                " vs natural " + std::to_string(b));
  }
  if (a == 0) throw std::invalid_argument("empty waveform");
}

// Runs the per-frame computation shared by the forward and backward passes.
// When `spectra` is non-null the gradient spectra are stored; when `grad` is
// non-null they are also brought back to the time domain.
double Evaluate(std::span<const double> generated, std::span<const double> natural,
                const dsp::StftConfig& cfg, double eta, std::vector<dsp::Spectrum>* spectra,
                std::vector<double>* grad) {
  CheckLengths(generated.size(), natural.size());
  cfg.Validate();
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");

  const dsp::FrameMatrix gen = dsp::FrameAndWindow(generated, cfg);
  const dsp::FrameMatrix nat = dsp::FrameAndWindow(natural, cfg);
  const int64_t N = gen.num_frames;
  const int K = cfg.dft_bins;
  const int M = cfg.frame_length;
  const double norm = static_cast<double>(N) * K;

  dsp::FrameMatrix frame_grad;
  if (grad) {
    frame_grad.num_frames = N;
    frame_grad.frame_length = M;
    frame_grad.values.assign(static_cast<size_t>(N * M), 0.0);
  }
  if (spectra) spectra->assign(static_cast<size_t>(N), {});

  double total = 0.0;
  for (int64_t n = 0; n < N; ++n) {
    const dsp::Spectrum yhat = dsp::Dft(gen.frame(n), K);
    const dsp::Spectrum y = dsp::Dft(nat.frame(n), K);
    dsp::Spectrum g(static_cast<size_t>(K));
    double frame_sum = 0.0;
    for (int k = 0; k < K; ++k) {
      const double p_hat = std::norm(yhat[static_cast<size_t>(k)]) + eta;
      const double p = std::norm(y[static_cast<size_t>(k)]) + eta;
      const double r = std::log(p) - std::log(p_hat);
      frame_sum += r * r;
      // d/dRe(yhat) of r^2 / (2NK) = -2 r Re(yhat) / (NK (|yhat|^2 + eta)).
      g[static_cast<size_t>(k)] = (-2.0 * r / (norm * p_hat)) * yhat[static_cast<size_t>(k)];
    }
    total += frame_sum;
    if (grad) {
      // The transform length can exceed M; entries past the frame are the
      // zero padding and carry no gradient.
      const std::vector<double> b = dsp::Idft(g);
      std::copy_n(b.begin(), M, frame_grad.frame(n).begin());
    }
    if (spectra) (*spectra)[static_cast<size_t>(n)] = std::move(g);
  }
  if (grad) {
    *grad = dsp::OverlapAddWindowed(frame_grad, cfg.frame_shift,
                                    static_cast<int64_t>(generated.size()));
  }
  return total / (2.0 * norm);
}

}  // namespace

std::vector<dsp::StftConfig> MultiResLossConfig::DefaultConfigs() {
  return {{512, 320, 80}, {128, 80, 40}, {2048, 1920, 640}};
}

void MultiResLossConfig::Validate() const {
  if (configs.empty()) throw std::invalid_argument("loss needs at least one STFT configuration");
  for (const auto& c : configs) c.Validate();
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
}

std::vector<dsp::StftConfig> ParseStftConfigs(const std::string& text) {
  std::vector<dsp::StftConfig> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    dsp::StftConfig c;
    char s1 = 0, s2 = 0;
    std::stringstream is(item);
    if (!(is >> c.dft_bins >> s1 >> c.frame_length >> s2 >> c.frame_shift) || s1 != ':' ||
        s2 != ':') {
      throw std::invalid_argument("bad STFT configuration '" + item +
                                  "', expected bins:length:shift");
    }
    c.Validate();
    out.push_back(c);
  }
  if (out.empty()) throw std::invalid_argument("no STFT configuration in '" + text + "'");
  return out;
}

std::string FormatStftConfigs(const std::vector<dsp::StftConfig>& configs) {
  std::string out;
  for (const auto& c : configs) {
    if (!out.empty()) out += ';';
    out += std::to_string(c.dft_bins) + ':' + std::to_string(c.frame_length) + ':' +
           std::to_string(c.frame_shift);
  }
  return out;
}

double SpectralDistance(std::span<const double> generated, std::span<const double> natural,
                        const dsp::StftConfig& cfg, double eta) {
  return Evaluate(generated, natural, cfg, eta, nullptr, nullptr);
}

std::vector<double> SpectralDistanceBackward(std::span<const double> generated,
                                             std::span<const double> natural,
                                             const dsp::StftConfig& cfg, double eta) {
  std::vector<double> grad;
  Evaluate(generated, natural, cfg, eta, nullptr, &grad);
  return grad;
}

LossAndGrad SpectralDistanceWithGrad(std::span<const double> generated,
                                     std::span<const double> natural,
                                     const dsp::StftConfig& cfg, double eta) {
  LossAndGrad out;
  out.loss = Evaluate(generated, natural, cfg, eta, nullptr, &out.grad);
  return out;
}

std::vector<dsp::Spectrum> GradientSpectra(std::span<const double> generated,
                                           std::span<const double> natural,
                                           const dsp::StftConfig& cfg, double eta) {
  std::vector<dsp::Spectrum> spectra;
  Evaluate(generated, natural, cfg, eta, &spectra, nullptr);
  return spectra;
}

LossAndGrad MultiResLoss(std::span<const double> generated, std::span<const double> natural,
                         const MultiResLossConfig& cfg) {
  cfg.Validate();
  LossAndGrad out;
  out.grad.assign(generated.size(), 0.0);
  for (const auto& c : cfg.configs) {
    const LossAndGrad part = SpectralDistanceWithGrad(generated, natural, c, cfg.eta);
    out.loss += part.loss;
    for (size_t t = 0; t < out.grad.size(); ++t) out.grad[t] += part.grad[t];
  }
  return out;
}

double WaveformMse(std::span<const double> generated, std::span<const double> natural) {
  CheckLengths(generated.size(), natural.size());
  double s = 0.0;
  for (size_t t = 0; t < generated.size(); ++t) {
    const double d = natural[t] - generated[t];
    s += d * d;
  }
  return s / static_cast<double>(generated.size());
}

LossAndGrad WaveformMseWithGrad(std::span<const double> generated,
                                std::span<const double> natural) {
  LossAndGrad out;
  out.loss = WaveformMse(generated, natural);
  const double scale = 2.0 / static_cast<double>(generated.size());
  out.grad.resize(generated.size());
  for (size_t t = 0; t < generated.size(); ++t) {
    out.grad[t] = scale * (generated[t] - natural[t]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graph ops.  The value is computed in double regardless of T.

namespace {

template <typename T>
class PairLossOp : public ag::Op<T> {
 public:
  Shape OutputShape(std::span<const Shape> in) const override {
    if (in.size() != 2) throw ShapeError("expects generated and natural waveforms");
    if (in[0] != in[1]) {
      throw ShapeError("waveform shapes differ: " + ShapeString(in[0]) + " vs " +
                       ShapeString(in[1]));
    }
    if (ShapeSize(in[0]) != in[0][0]) throw ShapeError("waveform must be a single column");
    return {1};
  }

  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    gen_.assign(in[0]->data(), in[0]->data() + in[0]->size());
    nat_.assign(in[1]->data(), in[1]->data() + in[1]->size());
    grad_gen_.clear();
    grad_nat_.clear();
    out[0] = static_cast<T>(Value(gen_, nat_));
  }

  void Backward(std::span<const Tensor<T>* const>, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    const double seed = static_cast<double>(g[0]);
    if (gin[0]) {
      if (grad_gen_.empty()) grad_gen_ = Gradient(gen_, nat_);
      for (int64_t t = 0; t < gin[0]->size(); ++t) {
        (*gin[0])[t] += static_cast<T>(seed * grad_gen_[static_cast<size_t>(t)]);
      }
    }
    if (gin[1]) {
      if (grad_nat_.empty()) grad_nat_ = GradientWrtNatural(gen_, nat_);
      for (int64_t t = 0; t < gin[1]->size(); ++t) {
        (*gin[1])[t] += static_cast<T>(seed * grad_nat_[static_cast<size_t>(t)]);
      }
    }
  }

 protected:
  virtual double Value(const std::vector<double>& gen, const std::vector<double>& nat) = 0;
  virtual std::vector<double> Gradient(const std::vector<double>& gen,
                                       const std::vector<double>& nat) = 0;
  virtual std::vector<double> GradientWrtNatural(const std::vector<double>& gen,
                                                 const std::vector<double>& nat) = 0;

 private:
  std::vector<double> gen_, nat_, grad_gen_, grad_nat_;
};

template <typename T>
class SpectralLossOp final : public PairLossOp<T> {
 public:
  explicit SpectralLossOp(MultiResLossConfig cfg) : cfg_(std::move(cfg)) { cfg_.Validate(); }
  ag::OpKind kind() const override { return ag::OpKind::kSpectralLoss; }

 protected:
  double Value(const std::vector<double>& gen, const std::vector<double>& nat) override {
    // The gradient comes almost for free with the value; keep it.
    LossAndGrad lg = MultiResLoss(gen, nat, cfg_);
    cached_ = std::move(lg.grad);
    return lg.loss;
  }
  std::vector<double> Gradient(const std::vector<double>&, const std::vector<double>&) override {
    return cached_;
  }
  // The distance is symmetric in its arguments.
  std::vector<double> GradientWrtNatural(const std::vector<double>& gen,
                                         const std::vector<double>& nat) override {
    return MultiResLoss(nat, gen, cfg_).grad;
  }

 private:
  MultiResLossConfig cfg_;
  std::vector<double> cached_;
};

template <typename T>
class MseOp final : public PairLossOp<T> {
 public:
  ag::OpKind kind() const override { return ag::OpKind::kWaveformMse; }

 protected:
  double Value(const std::vector<double>& gen, const std::vector<double>& nat) override {
    return WaveformMse(gen, nat);
  }
  std::vector<double> Gradient(const std::vector<double>& gen,
                               const std::vector<double>& nat) override {
    return WaveformMseWithGrad(gen, nat).grad;
  }
  std::vector<double> GradientWrtNatural(const std::vector<double>& gen,
                                         const std::vector<double>& nat) override {
    return WaveformMseWithGrad(nat, gen).grad;
  }
};

}  // namespace

template <typename T>
ag::NodeId AddSpectralLoss(ag::Graph<T>& graph, ag::NodeId generated, ag::NodeId natural,
                           const MultiResLossConfig& cfg) {
  return graph.Apply(std::make_unique<SpectralLossOp<T>>(cfg), {generated, natural},
                     "spectral_loss");
}

template <typename T>
ag::NodeId AddWaveformMse(ag::Graph<T>& graph, ag::NodeId generated, ag::NodeId natural) {
  return graph.Apply(std::make_unique<MseOp<T>>(), {generated, natural}, "waveform_mse");
}

template ag::NodeId AddSpectralLoss(ag::Graph<float>&, ag::NodeId, ag::NodeId,
                                    const MultiResLossConfig&);
template ag::NodeId AddSpectralLoss(ag::Graph<double>&, ag::NodeId, ag::NodeId,
                                    const MultiResLossConfig&);
template ag::NodeId AddWaveformMse(ag::Graph<float>&, ag::NodeId, ag::NodeId);
template ag::NodeId AddWaveformMse(ag::Graph<double>&, ag::NodeId, ag::NodeId);

}  // namespace nsf::loss
