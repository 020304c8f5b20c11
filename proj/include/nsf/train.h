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

// Segmentation, the training loop and early stopping.  Batch size is one
// segment; every step is forward, multi-resolution loss, backward, Adam.

#ifndef NSF_TRAIN_H_
#define NSF_TRAIN_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "nsf/dsp.h"
#include "nsf/features.h"
#include "nsf/models.h"
#include "nsf/optimizer.h"
#include "nsf/spectral_loss.h"

namespace nsf::train {

struct TrainConfig {
  AdamConfig adam;
  int batch_size = 1;
  double max_segment_seconds = 3.0;
  int patience = 5;         // consecutive validation increases before stopping
  int max_epochs = 1000;
  int64_t max_steps = -1;   // < 0: no limit
  uint64_t seed = 1;
  uint64_t validation_seed = 7;
  loss::MultiResLossConfig loss;

  void Validate() const;
};

// A waveform with its aligned features, T = B * upsample.
struct Utterance {
  std::string name;
  dsp::Waveform wave;
  features::FeatureSequence feat;
};

// Trims waveform and features to the shorter of T and B * upsample, rounded
// down to whole frames.  Throws if they differ by more than one frame.
// Returns a description of the trim, empty when nothing changed.
std::string AlignLengths(Utterance& utt, int upsample);

// Cuts at frame boundaries into pieces of at most `max_seconds`; the last
// piece may be shorter.  The input must be aligned.
std::vector<Utterance> SegmentUtterance(const Utterance& utt, double max_seconds, int upsample);

// Stops once the validation loss has risen `patience` epochs in a row.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  // Records one epoch (1-based in order of calls); returns true to stop.
  bool Update(double val_loss);
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  bool improved() const { return improved_; }
  int epochs() const { return epochs_; }

 private:
  int patience_;
  int epochs_ = 0;
  int increases_ = 0;
  int best_epoch_ = 0;
  double best_loss_ = 0.0;
  double last_ = 0.0;
  bool improved_ = false;
};

// Runs steps and evaluations on one model, reusing the graph while the
// segment length stays the same.
class Trainer {
 public:
  Trainer(model::NsfModel<float>& model, const TrainConfig& config);

  // One Adam step on a segment.  Returns the loss before the update.
  // Throws std::runtime_error if the loss is not finite.
  double Step(const Utterance& seg, uint64_t seed);
  // Loss without an update.
  double Evaluate(const Utterance& seg, uint64_t seed, bool add_noise);

  const Adam<float>& optimizer() const { return adam_; }

 private:
  model::ModelGraph<float>& GraphFor(int64_t frames);
  double Forward(const Utterance& seg, uint64_t seed, bool add_noise);

  model::NsfModel<float>& model_;
  TrainConfig config_;
  Adam<float> adam_;
  std::unique_ptr<model::ModelGraph<float>> graph_;
  int64_t graph_frames_ = -1;
  model::ModelInputs<float> inputs_;
  Tensor<float> target_;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double seconds = 0.0;
  std::string checkpoint;  // empty when this epoch was not the best so far
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  int64_t steps = 0;
  int64_t skipped_steps = 0;
};

struct TrainHooks {
  // Receives one `epoch,train_loss,val_loss,seconds` line per epoch, and
  // diagnostics prefixed by '#'.
  std::function<void(const std::string&)> log;
  // Where the best model is written; empty keeps it in memory only.
  std::string checkpoint_path;
};

// Trains until early stopping, max_epochs or max_steps.  On return the model
// holds the parameters of the best validation epoch.
TrainLog Train(model::NsfModel<float>& model, const std::vector<Utterance>& train_set,
               const std::vector<Utterance>& validation_set, const TrainConfig& config,
               const TrainHooks& hooks = {});

// The header line of the epoch log.
inline constexpr const char* kLogHeader = "epoch,train_loss,val_loss,seconds";
std::string FormatEpoch(const EpochRecord& r);

}  // namespace nsf::train

#endif  // NSF_TRAIN_H_
