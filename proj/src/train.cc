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

#include "nsf/train.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "nsf/checkpoint.h"
#include "nsf/source.h"

namespace nsf::train {

void TrainConfig::Validate() const {
  adam.Validate();
  if (batch_size != 1) throw std::invalid_argument("only batch_size = 1 is supported");
  if (!(max_segment_seconds > 0.0)) throw std::invalid_argument("max_segment_seconds must be > 0");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  if (!(loss.eta > 0.0) || loss.configs.empty()) {
    throw std::invalid_argument("loss needs eta > 0 and at least one STFT configuration");
  }
}

std::string AlignLengths(Utterance& utt, int upsample) {
  const int64_t T = utt.wave.size();
  const int64_t B = utt.feat.num_frames();
  const int64_t want = B * upsample;
  if (std::llabs(T - want) > upsample) {
    throw std::invalid_argument("'" + utt.name + "': waveform has " + std::to_string(T) +
                                " samples but " + std::to_string(B) + " frames imply " +
                                std::to_string(want));
  }
  const int64_t frames = std::min(T, want) / upsample;
  if (frames < 1) throw std::invalid_argument("'" + utt.name + "' is shorter than one frame");
  const int64_t samples = frames * upsample;
  if (frames == B && samples == T) return {};
  std::string msg = "'" + utt.name + "': trimmed " + std::to_string(T) + " samples / " +
                    std::to_string(B) + " frames to " + std::to_string(samples) + " / " +
                    std::to_string(frames);
  utt.wave.samples.resize(static_cast<size_t>(samples));
  if (frames != B) utt.feat = utt.feat.Slice(0, frames);
  return msg;
}

std::vector<Utterance> SegmentUtterance(const Utterance& utt, double max_seconds, int upsample) {
  const int64_t B = utt.feat.num_frames();
  if (utt.wave.size() != B * upsample) {
    throw std::invalid_argument("'" + utt.name + "' is not aligned; call AlignLengths first");
  }
  const int64_t per = std::max<int64_t>(
      1, static_cast<int64_t>(std::floor(max_seconds * utt.wave.sample_rate / upsample + 1e-9)));
  std::vector<Utterance> out;
  for (int64_t b = 0; b < B; b += per) {
    const int64_t e = std::min(B, b + per);
    Utterance s;
    s.name = utt.name + (B > per ? "#" + std::to_string(out.size()) : "");
    s.wave.sample_rate = utt.wave.sample_rate;
    s.wave.samples.assign(utt.wave.samples.begin() + b * upsample,
                          utt.wave.samples.begin() + e * upsample);
    s.feat = utt.feat.Slice(b, e);
    out.push_back(std::move(s));
  }
  return out;
}

bool EarlyStopping::Update(double val_loss) {
  ++epochs_;
  improved_ = epochs_ == 1 || val_loss < best_loss_;
  if (improved_) {
    best_loss_ = val_loss;
    best_epoch_ = epochs_;
  }
  increases_ = (epochs_ > 1 && val_loss > last_) ? increases_ + 1 : 0;
  last_ = val_loss;
  return increases_ >= patience_;
}

Trainer::Trainer(model::NsfModel<float>& model, const TrainConfig& config)
    : model_(model), config_(config), adam_(config.adam) {
  config_.Validate();
}

model::ModelGraph<float>& Trainer::GraphFor(int64_t frames) {
  if (!graph_ || graph_frames_ != frames) {
    graph_.reset();  // free the old activations before allocating new ones
    model::GraphOptions opts;
    opts.loss = model::LossKind::kSpectral;
    opts.loss_config = config_.loss;
    graph_ = std::make_unique<model::ModelGraph<float>>(model::BuildGraph(model_, frames, opts));
    graph_frames_ = frames;
  }
  return *graph_;
}

double Trainer::Forward(const Utterance& seg, uint64_t seed, bool add_noise) {
  const int64_t frames = seg.feat.num_frames();
  if (seg.wave.size() != frames * model_.config().upsample) {
    throw std::invalid_argument("'" + seg.name + "' is not aligned to its features");
  }
  auto& g = GraphFor(frames);
  inputs_ = model::PrepareInputs(model_, seg.feat, seed, add_noise);
  target_ = Tensor<float>({seg.wave.size(), 1}, seg.wave.samples);
  return g.graph.Forward(g.Bind(inputs_, &target_))[0];
}

double Trainer::Step(const Utterance& seg, uint64_t seed) {
  const double loss = Forward(seg, seed, true);
  if (!std::isfinite(loss)) {
    throw std::runtime_error("non-finite training loss on '" + seg.name + "' at step " +
                             std::to_string(adam_.step() + 1) + " (last gradient norm " +
                             std::to_string(adam_.last_grad_norm()) + ")");
  }
  model_.params().ZeroGrad();
  graph_->graph.Backward(Tensor<float>({1}, 1.0f));
  adam_.Step(model_.params());
  return loss;
}

double Trainer::Evaluate(const Utterance& seg, uint64_t seed, bool add_noise) {
  return Forward(seg, seed, add_noise);
}

std::string FormatEpoch(const EpochRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.2f", r.epoch, r.train_loss, r.val_loss,
                r.seconds);
  return buf;
}

TrainLog Train(model::NsfModel<float>& model, const std::vector<Utterance>& train_set,
               const std::vector<Utterance>& validation_set, const TrainConfig& config,
               const TrainHooks& hooks) {
  config.Validate();
  if (train_set.empty()) throw std::invalid_argument("training split is empty");
  if (validation_set.empty()) throw std::invalid_argument("validation split is empty");
  auto log = [&](const std::string& s) {
    if (hooks.log) hooks.log(s);
  };
  const int up = model.config().upsample;

  std::vector<Utterance> segments;
  for (Utterance u : train_set) {
    const std::string trim = AlignLengths(u, up);
    if (!trim.empty()) log("# " + trim);
    for (auto& s : SegmentUtterance(u, config.max_segment_seconds, up)) segments.push_back(std::move(s));
  }
  std::vector<Utterance> validation;
  for (Utterance u : validation_set) {
    const std::string trim = AlignLengths(u, up);
    if (!trim.empty()) log("# " + trim);
    for (auto& s : SegmentUtterance(u, config.max_segment_seconds, up)) validation.push_back(std::move(s));
  }

  Trainer trainer(model, config);
  EarlyStopping stopper(config.patience);
  model::NsfModel<float> best = model;
  TrainLog result;
  std::mt19937_64 shuffle_rng(source::StreamSeed(config.seed, 0x5348));
  std::vector<size_t> order(segments.size());
  log(kLogHeader);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double train_sum = 0.0;
    int64_t train_count = 0;
    for (size_t i : order) {
      if (config.max_steps >= 0 && trainer.optimizer().step() >= config.max_steps) break;
      const int64_t before = trainer.optimizer().skipped();
      train_sum += trainer.Step(segments[i], source::StreamSeed(config.seed, static_cast<uint64_t>(trainer.optimizer().step()) + 1));
      ++train_count;
      if (trainer.optimizer().skipped() != before) {
        log("# step " + std::to_string(trainer.optimizer().step()) +
            " skipped: non-finite gradient on '" + segments[i].name + "'");
      }
    }

    double val_sum = 0.0;
    for (const Utterance& v : validation) {
      val_sum += trainer.Evaluate(v, config.validation_seed, false);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = train_count > 0 ? train_sum / static_cast<double>(train_count) : 0.0;
    rec.val_loss = val_sum / static_cast<double>(validation.size());
    if (!std::isfinite(rec.val_loss)) {
      throw std::runtime_error("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    const bool stop = stopper.Update(rec.val_loss);
    if (stopper.improved()) {
      best = model;
      if (!hooks.checkpoint_path.empty()) {
        io::SaveCheckpoint(hooks.checkpoint_path, model);
        rec.checkpoint = hooks.checkpoint_path;
      }
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log(FormatEpoch(rec));
    result.epochs.push_back(rec);
    if (stop) {
      log("# validation loss rose for " + std::to_string(config.patience) +
          " consecutive epochs; stopping");
      break;
    }
    if (config.max_steps >= 0 && trainer.optimizer().step() >= config.max_steps) break;
  }
  result.best_epoch = stopper.best_epoch();
  result.steps = trainer.optimizer().step();
  result.skipped_steps = trainer.optimizer().skipped();
  // Copy values so parameter addresses held by live graphs stay valid.
  for (size_t i = 0; i < model.params().size(); ++i) {
    model.params()[i].value = best.params()[i].value;
  }
  return result;
}

}  // namespace nsf::train
